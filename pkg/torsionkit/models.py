# models.py
"""JSON payloads for complexes, surfaces and reports.

Rationals travel as strings ("p/q", or "p" when q = 1).
"""
import json
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Dict, List, Optional

from sqlmodel import Field, SQLModel

from torsionkit.errors import ShapeError
from torsionkit.services.complex import BasedChainComplex, GradedBases, HomologyData, euler_characteristic
from torsionkit.services.mv import AdaptedBases, LongExactSequence
from torsionkit.services.pairing import delta_02, intersection_form, period_matrix, symplectic_basis
from torsionkit.services.ratlin import BasisList, RatMatrix, det
from torsionkit.services.surf import BoundaryCircle, PantsDecomposition, SurfaceComplex
from torsionkit.services.torsion import TorsionValue

if TYPE_CHECKING:
    from torsionkit.services.formulas import VerificationReport


def rational(value) -> str:
    return str(Fraction(value))


def matrix_rows(m: RatMatrix) -> List[List[str]]:
    return [[rational(e) for e in row] for row in m.to_rows()]


def basis_vectors(basis: BasisList) -> List[List[str]]:
    return [[rational(a) for a in v] for v in basis]


# --- Complexes and surfaces ---

class ComplexPayload(SQLModel):
    dims: List[int]
    boundaries: List[List[List[str]]] = Field(default_factory=list)
    labels: Optional[List[List[str]]] = None


class CirclePayload(SQLModel):
    name: str
    vertex: int
    loop: int


class SurfacePayload(ComplexPayload):
    vertex_labels: List[str]
    edge_labels: List[str]
    edge_ends: List[List[int]]
    face_labels: List[str]
    attaching_words: List[List[List[int]]]
    words: List[str] = Field(default_factory=list)
    boundary_circles: List[CirclePayload] = Field(default_factory=list)
    genus: int = 0
    euler_characteristic: int = 0


def complex_to_payload(c: BasedChainComplex) -> ComplexPayload:
    return ComplexPayload(
        dims=list(c.dims),
        boundaries=[matrix_rows(m) for m in c.boundaries],
        labels=[list(row) for row in c.labels],
    )


def payload_to_complex(payload: ComplexPayload) -> BasedChainComplex:
    dims = payload.dims
    if len(payload.boundaries) != max(len(dims) - 1, 0):
        raise ShapeError(f"{len(dims)} chain groups need {max(len(dims) - 1, 0)} boundary maps.")
    boundaries = tuple(
        RatMatrix.from_rows([[Fraction(e) for e in row] for row in rows], dims[p])
        for p, rows in enumerate(payload.boundaries, start=1)
    )
    labels = tuple(tuple(row) for row in payload.labels) if payload.labels is not None else None
    return BasedChainComplex(tuple(dims), boundaries, labels)


def surface_to_payload(x: SurfaceComplex) -> SurfacePayload:
    c = complex_to_payload(x.complex)
    return SurfacePayload(
        **c.model_dump(),
        vertex_labels=list(x.vertex_labels),
        edge_labels=list(x.edge_labels),
        edge_ends=[list(ends) for ends in x.edge_ends],
        face_labels=list(x.face_labels),
        attaching_words=[[list(letter) for letter in word] for word in x.attaching_words],
        words=x.word_strings(),
        boundary_circles=[CirclePayload(name=b.name, vertex=b.vertex, loop=b.loop) for b in x.boundary_circles],
        genus=x.genus,
        euler_characteristic=x.euler_characteristic,
    )


def payload_to_surface(payload: SurfacePayload) -> SurfaceComplex:
    return SurfaceComplex(
        vertex_labels=tuple(payload.vertex_labels),
        edge_labels=tuple(payload.edge_labels),
        edge_ends=tuple((tail, head) for tail, head in payload.edge_ends),
        face_labels=tuple(payload.face_labels),
        attaching_words=tuple(tuple((e, s) for e, s in word) for word in payload.attaching_words),
        boundary_circles=tuple(BoundaryCircle(b.name, b.vertex, b.loop) for b in payload.boundary_circles),
        genus=payload.genus,
    )


def load_complex(text: str) -> BasedChainComplex:
    """Parses complex JSON; surface JSON is accepted and rebuilt from its attaching words."""
    raw = json.loads(text)
    if isinstance(raw, dict) and "attaching_words" in raw:
        return payload_to_surface(SurfacePayload.model_validate(raw)).complex
    return payload_to_complex(ComplexPayload.model_validate(raw))


# --- Reports ---

class HomologyReport(SQLModel):
    betti: List[int]
    euler_characteristic: int
    representatives: List[List[List[str]]]


def homology_report(c: BasedChainComplex, data: HomologyData) -> HomologyReport:
    return HomologyReport(
        betti=list(data.betti),
        euler_characteristic=euler_characteristic(c),
        representatives=[basis_vectors(h) for h in data.representatives],
    )


class TorsionReport(SQLModel):
    value: str
    abs: str
    degree_factors: List[str]
    convention: str
    seed: int
    trial_values: List[str] = Field(default_factory=list)
    choice_independent: bool = True


def torsion_report(reference: TorsionValue, trials: List[TorsionValue], seed: int) -> TorsionReport:
    return TorsionReport(
        value=rational(reference.value),
        abs=rational(reference.abs_value),
        degree_factors=[rational(f) for f in reference.degree_factors],
        convention=reference.convention.value,
        seed=seed,
        trial_values=[rational(t.value) for t in trials],
        choice_independent=all(t.abs_value == reference.abs_value for t in trials),
    )


class PiecePayload(SQLModel):
    index: int
    kind: str
    label: str
    circles: List[str]


class DecompositionReport(SQLModel):
    genus: int
    boundary: int
    piece_count: int
    pieces: List[PiecePayload]
    cutting_circles: List[str]
    torus_circles: List[str]
    boundary_circles: List[str]
    adjacency: Dict[str, List[int]]


def decomposition_report(d: PantsDecomposition) -> DecompositionReport:
    return DecompositionReport(
        genus=d.genus,
        boundary=d.boundary,
        piece_count=d.piece_count,
        pieces=[PiecePayload(index=p.index, kind=p.kind, label=p.label, circles=list(p.circles)) for p in d.pieces],
        cutting_circles=list(d.cutting_circles),
        torus_circles=list(d.torus_circles),
        boundary_circles=list(d.boundary_circles),
        adjacency={name: list(v) for name, v in d.adjacency().items()},
    )


class LesTermPayload(SQLModel):
    index: int
    label: str
    dim: int


class LesReport(SQLModel):
    terms: List[LesTermPayload]
    maps: List[List[List[str]]]
    determinants: List[str]
    torsion: str


def les_report(sequence: LongExactSequence, adapted: AdaptedBases, value) -> LesReport:
    """Terms, map matrices and per-term change-of-basis determinants of an adapted sequence."""
    c = sequence.complex
    return LesReport(
        terms=[LesTermPayload(index=t.index, label=t.label, dim=c.dim(t.index)) for t in sequence.terms],
        maps=[matrix_rows(m) for m in c.boundaries],
        determinants=[rational(f) for f in adapted.factors()],
        torsion=rational(value),
    )


class PairingReport(SQLModel):
    cycles: List[List[str]]
    symplectic_cycles: List[List[str]]
    intersection_matrix: List[List[str]]
    period_matrix: List[List[str]]
    delta: List[List[str]]
    det_period: str
    det_delta: str


def pairing_report(x: SurfaceComplex, h: GradedBases) -> PairingReport:
    gamma = symplectic_basis(x)
    periods = period_matrix(x, gamma, h[1].vectors)
    delta = delta_02(x, h[0][0], h[2][0])
    return PairingReport(
        cycles=basis_vectors(h[1]),
        symplectic_cycles=basis_vectors(gamma.cycles),
        intersection_matrix=matrix_rows(intersection_form(x, h[1].vectors)),
        period_matrix=matrix_rows(periods),
        delta=matrix_rows(delta),
        det_period=rational(det(periods)),
        det_delta=rational(det(delta)),
    )


class VerificationReportRead(SQLModel):
    identity: str
    lhs: str
    rhs: str
    equal: bool
    holds: bool
    checks: Dict[str, bool] = Field(default_factory=dict)
    witness: Dict[str, Any] = Field(default_factory=dict)


def verification_read(report: "VerificationReport") -> VerificationReportRead:
    return VerificationReportRead(
        identity=report.identity,
        lhs=rational(report.lhs),
        rhs=rational(report.rhs),
        equal=report.equal,
        holds=report.holds,
        checks=dict(report.checks),
        witness=report.witness,
    )


def to_json(model: SQLModel) -> str:
    """One deterministic JSON document per payload."""
    return json.dumps(model.model_dump(mode="json"), sort_keys=True, indent=2)
