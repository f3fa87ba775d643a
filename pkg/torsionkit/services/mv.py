# services/mv.py
"""Mayer-Vietoris sequences of decompositions X = A ∪ B with A ∩ B = I.

The long exact sequence is stored as an acyclic based complex whose term p is
H_q(X) for p = 3q, H_q(A) ⊕ H_q(B) for p = 3q + 1 and H_q(I) for p = 3q + 2.
Coordinates in every term are taken in the homology bases the sequence was
built with, A before B in the middle terms.
"""
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from torsionkit.errors import (
    ChainComplexError,
    DecompositionError,
    ExactnessError,
    OverdeterminedPatternError,
    SurfaceError,
)
from torsionkit.services.complex import (
    BasedChainComplex,
    GradedBases,
    HomologyData,
    direct_sum,
    homology,
    is_chain_map,
    standard_bases,
    validate,
)
from torsionkit.services.ratlin import (
    BasisList,
    RatMatrix,
    Vector,
    add_vectors,
    combine,
    det,
    image_basis,
    rank,
    solve,
    solve_many,
)
from torsionkit.services.torsion import Convention, torsion, torsion_acyclic

logger = logging.getLogger(__name__)

# Per degree, per source cell: (target cell index, ±1).
CellMap = tuple[tuple[tuple[int, int], ...], ...]

WHOLE = "X"
PIECES = "A⊕B"
INTERSECTION = "I"


def _cell_matrix(cell_map: CellMap, p: int, source_dim: int, target_dim: int) -> RatMatrix:
    rows = [[0] * source_dim for _ in range(target_dim)]
    if p < len(cell_map):
        if len(cell_map[p]) != source_dim:
            raise DecompositionError(f"Cell map in degree {p} covers {len(cell_map[p])} of {source_dim} cells.")
        for j, (target, sign) in enumerate(cell_map[p]):
            if not 0 <= target < target_dim:
                raise DecompositionError(f"Cell map in degree {p} points outside the target: {target}.")
            rows[target][j] = sign
    elif source_dim:
        raise DecompositionError(f"Cell map is missing degree {p}.")
    return RatMatrix.from_rows(rows, source_dim)


@dataclass(frozen=True)
class Decomposition:
    """X = A ∪ B with intersection I, described by signed cell inclusions."""
    x: BasedChainComplex
    a: BasedChainComplex
    b: BasedChainComplex
    i: BasedChainComplex
    i_to_a: CellMap
    i_to_b: CellMap
    a_to_x: CellMap
    b_to_x: CellMap

    @property
    def top_degree(self) -> int:
        return max(self.x.top_degree, self.a.top_degree, self.b.top_degree, self.i.top_degree)

    def maps(self, cell_map: CellMap, source: BasedChainComplex, target: BasedChainComplex) -> tuple[RatMatrix, ...]:
        return tuple(_cell_matrix(cell_map, p, source.dim(p), target.dim(p)) for p in range(self.top_degree + 1))

    def inclusion(self, name: str) -> tuple[RatMatrix, ...]:
        source, target, cell_map = {
            "i_to_a": (self.i, self.a, self.i_to_a),
            "i_to_b": (self.i, self.b, self.i_to_b),
            "a_to_x": (self.a, self.x, self.a_to_x),
            "b_to_x": (self.b, self.x, self.b_to_x),
        }[name]
        return self.maps(cell_map, source, target)

    def validate(self) -> None:
        for name, source, target in (("i_to_a", self.i, self.a), ("i_to_b", self.i, self.b),
                                     ("a_to_x", self.a, self.x), ("b_to_x", self.b, self.x)):
            if not is_chain_map(source, target, self.inclusion(name)):
                raise DecompositionError(f"Inclusion {name} is not a chain map.")
        ia, ib = self.inclusion("i_to_a"), self.inclusion("i_to_b")
        ja, jb = self.inclusion("a_to_x"), self.inclusion("b_to_x")
        for p in range(self.top_degree + 1):
            if ja[p] @ ia[p] != jb[p] @ ib[p]:
                raise DecompositionError(f"I maps inconsistently into X through A and B in degree {p}.")
            covered = {t for t, _ in (self.a_to_x[p] if p < len(self.a_to_x) else ())}
            covered |= {t for t, _ in (self.b_to_x[p] if p < len(self.b_to_x) else ())}
            if len(covered) != self.x.dim(p):
                raise DecompositionError(f"Cells of X in degree {p} are not covered by A and B.")


# --- Short exact sequence ---

@dataclass(frozen=True)
class ShortExactSequence:
    """0 -> C(I) -> C(A) ⊕ C(B) -> C(X) -> 0 with x ↦ (x, −x) and (u, v) ↦ u + v."""
    middle: BasedChainComplex
    injection: tuple[RatMatrix, ...]
    projection: tuple[RatMatrix, ...]


def short_exact(dec: Decomposition) -> ShortExactSequence:
    dec.validate()
    ia, ib = dec.inclusion("i_to_a"), dec.inclusion("i_to_b")
    ja, jb = dec.inclusion("a_to_x"), dec.inclusion("b_to_x")
    middle = direct_sum(dec.a, dec.b)
    injection = tuple(ia[p].vstack(-ib[p]) for p in range(dec.top_degree + 1))
    projection = tuple(ja[p].hstack(jb[p]) for p in range(dec.top_degree + 1))
    for p in range(dec.top_degree + 1):
        d_i, d_m, d_x = dec.i.dim(p), middle.dim(p), dec.x.dim(p)
        if rank(injection[p]) != d_i:
            raise ExactnessError(f"C_{p}(I) -> C_{p}(A) ⊕ C_{p}(B) is not injective.")
        if rank(projection[p]) != d_x:
            raise ExactnessError(f"C_{p}(A) ⊕ C_{p}(B) -> C_{p}(X) is not surjective.")
        if not (projection[p] @ injection[p]).is_zero() or d_i - d_m + d_x != 0:
            raise ExactnessError(f"Short sequence is not exact in the middle in degree {p}.")
    return ShortExactSequence(middle, injection, projection)


def connecting_cycle(dec: Decomposition, ses: ShortExactSequence, q: int, z: Sequence[Fraction],
                     perturbation: Sequence[Fraction] | None = None) -> Vector:
    """The zigzag: lift the q-cycle z of X to A ⊕ B, take ∂, pull back to a (q-1)-cycle of I.

    ``perturbation`` (a q-chain of I) changes the lift by its image, which moves
    the result by a boundary.
    """
    lift = solve(ses.projection[q], z)
    if perturbation is not None:
        lift = add_vectors(lift, ses.injection[q].apply(perturbation))
    image = ses.middle.boundary(q).apply(lift)
    return solve(ses.injection[q - 1], image)


# --- Long exact sequence ---

@dataclass(frozen=True)
class MVBases:
    """Homology bases for the four spaces of a decomposition."""
    x: GradedBases
    a: GradedBases
    b: GradedBases
    i: GradedBases

    @classmethod
    def standard(cls, dec: Decomposition) -> "MVBases":
        return cls(*(standard_bases(homology(c)) for c in (dec.x, dec.a, dec.b, dec.i)))


@dataclass(frozen=True)
class LesTerm:
    index: int
    space: str
    degree: int

    @property
    def label(self) -> str:
        return f"H{self.degree}({self.space})"


@dataclass(frozen=True)
class LongExactSequence:
    complex: BasedChainComplex
    terms: tuple[LesTerm, ...]
    decomposition: Decomposition
    sequence: ShortExactSequence
    bases: MVBases
    homologies: tuple[HomologyData, HomologyData, HomologyData, HomologyData]  # X, A, B, I

    def term_index(self, space: str, degree: int) -> int:
        for term in self.terms:
            if term.space == space and term.degree == degree:
                return term.index
        raise KeyError(f"No term H{degree}({space}) in this sequence.")

    def terms_of(self, spaces: Iterable[str]) -> tuple[int, ...]:
        spaces = set(spaces)
        return tuple(t.index for t in self.terms if t.space in spaces)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.complex.dims


def _basis_at(h: GradedBases, q: int, dim: int) -> BasisList:
    return h[q] if q < len(h) else BasisList(dim)


def _coords(data: HomologyData, q: int, basis: BasisList, z: Sequence[Fraction]) -> Vector:
    if not len(basis):
        return ()
    return data.class_coordinates(q, z, basis)


def les(dec: Decomposition, bases: MVBases | None = None, ses: ShortExactSequence | None = None) -> LongExactSequence:
    """Realizes the Mayer-Vietoris sequence as matrices in the given homology bases."""
    ses = ses or short_exact(dec)
    bases = bases or MVBases.standard(dec)
    hx, ha, hb, hi = (homology(c) for c in (dec.x, dec.a, dec.b, dec.i))
    ia, ib = dec.inclusion("i_to_a"), dec.inclusion("i_to_b")
    ja, jb = dec.inclusion("a_to_x"), dec.inclusion("b_to_x")
    top = dec.top_degree

    terms, dims, maps = [], [], {}
    for q in range(top + 1):
        bx = _basis_at(bases.x, q, dec.x.dim(q))
        ba = _basis_at(bases.a, q, dec.a.dim(q))
        bb = _basis_at(bases.b, q, dec.b.dim(q))
        bi = _basis_at(bases.i, q, dec.i.dim(q))
        for basis, data, name in ((bx, hx, "x"), (ba, ha, "a"), (bb, hb, "b"), (bi, hi, "i")):
            if len(basis) != data.betti_at(q):
                raise ChainComplexError(f"Basis of H_{q}({name}) has {len(basis)} vectors, expected {data.betti_at(q)}.", degree=q)
        terms += [LesTerm(3 * q, WHOLE, q), LesTerm(3 * q + 1, PIECES, q), LesTerm(3 * q + 2, INTERSECTION, q)]
        dims += [len(bx), len(ba) + len(bb), len(bi)]

        # q_*: H_q(A) ⊕ H_q(B) -> H_q(X)
        columns = [_coords(hx, q, bx, ja[q].apply(u)) for u in ba] + [_coords(hx, q, bx, jb[q].apply(v)) for v in bb]
        maps[3 * q + 1] = RatMatrix.from_columns(columns, len(bx))
        # i_*: H_q(I) -> H_q(A) ⊕ H_q(B), x ↦ (x, −x)
        columns = [
            _coords(ha, q, ba, ia[q].apply(x)) + _coords(hb, q, bb, tuple(-c for c in ib[q].apply(x)))
            for x in bi
        ]
        maps[3 * q + 2] = RatMatrix.from_columns(columns, len(ba) + len(bb))
        # δ: H_q(X) -> H_{q-1}(I)
        if q >= 1:
            below = _basis_at(bases.i, q - 1, dec.i.dim(q - 1))
            columns = [_coords(hi, q - 1, below, connecting_cycle(dec, ses, q, z)) for z in bx]
            maps[3 * q] = RatMatrix.from_columns(columns, len(below))

    while len(dims) > 1 and dims[-1] == 0:
        dims.pop()
        terms.pop()
    boundaries = tuple(maps[p] for p in range(1, len(dims)))
    labels = tuple(tuple(f"{t.label}[{k}]" for k in range(d)) for t, d in zip(terms, dims))
    complex_ = BasedChainComplex(tuple(dims), boundaries, labels)
    check_exact(complex_)
    logger.debug(f"Mayer-Vietoris sequence built with term dims {complex_.dims}")
    return LongExactSequence(complex_, tuple(terms), dec, ses, bases, (hx, ha, hb, hi))


def check_exact(c: BasedChainComplex) -> None:
    try:
        validate(c)
    except ChainComplexError as e:
        raise ExactnessError(f"Mayer-Vietoris maps do not compose to zero: {e}") from e
    for p in range(c.top_degree + 1):
        if rank(c.boundary(p)) + rank(c.boundary(p + 1)) != c.dim(p):
            raise ExactnessError(f"Mayer-Vietoris sequence is not exact at term {p}.")


def les_torsion(L: LongExactSequence, convention: Convention = Convention.LITERAL) -> Fraction:
    return torsion_acyclic(L.complex, convention=convention).value


# --- Adapted bases ---

@dataclass(frozen=True)
class AdaptedBases:
    """Bases of the free terms that make every torsion factor of the sequence equal to 1.

    ``coefficient_matrices`` keeps, for each free term, the coordinates of the
    image basis followed by the sections before any normalization; ``scales``
    holds the factor applied to the first boundary-basis vector of each term.
    """
    free_terms: tuple[int, ...]
    boundary_bases: tuple[BasisList, ...]
    sections: tuple[BasisList, ...]
    term_bases: tuple[BasisList, ...]
    coefficient_matrices: dict[int, RatMatrix] = field(default_factory=dict)
    scales: tuple[Fraction, ...] = ()

    def assembled(self, p: int) -> BasisList:
        return self.boundary_bases[p].concat(self.sections[p])

    def factors(self) -> tuple[Fraction, ...]:
        """det[b_p ⊔ s_p(b_{p-1}), h'_p] for every term."""
        out = []
        for p, basis in enumerate(self.term_bases):
            assembled = self.assembled(p)
            if not len(assembled):
                out.append(Fraction(1))
                continue
            coords = solve_many(basis.as_matrix(), assembled.vectors)
            out.append(det(RatMatrix.from_columns(coords, len(basis))))
        return tuple(out)

    def coefficient_determinants(self) -> dict[int, Fraction]:
        return {p: det(m) if m.rows else Fraction(1) for p, m in self.coefficient_matrices.items()}


def _sections(c: BasedChainComplex, p: int, lower: BasisList) -> BasisList:
    vectors = solve_many(c.boundary(p), lower.vectors) if len(lower) else []
    return BasisList(c.dim(p), tuple(vectors))


def adapted_bases(L: LongExactSequence, free: Iterable[int]) -> AdaptedBases:
    """Sweeps the terms upwards, normalizing boundary bases in fixed terms.

    In a fixed term with a nonzero boundary space the first vector of b_p is
    divided by det[b_p ⊔ s_p(b_{p-1}), h_p]. In a fixed term without one the
    determinant is pushed down into b_{p-1}, which is only allowed when term
    p - 1 is free. Free terms take h'_p = b_p ⊔ s_p(b_{p-1}).
    """
    c = L.complex
    free = tuple(sorted(set(free)))
    n = c.top_degree
    boundary_bases: list[BasisList] = []
    sections: list[BasisList] = []
    scales = [Fraction(1)] * (n + 1)
    raw: dict[int, RatMatrix] = {}
    for p in range(n + 1):
        lower = boundary_bases[p - 1] if p >= 1 else BasisList(0)
        s = _sections(c, p, lower)
        img = image_basis(c.boundary(p + 1))
        if p in free:
            raw[p] = img.concat(s).as_matrix()
            boundary_bases.append(img)
            sections.append(s)
            continue
        if len(img):
            d = det(img.concat(s).as_matrix())
            boundary_bases.append(img.scaled_first(1 / d))
            scales[p] = 1 / d
        else:
            d = det(s.as_matrix()) if len(s) else Fraction(1)
            if d != 1:
                if p - 1 not in free:
                    raise OverdeterminedPatternError(
                        f"Term {L.terms[p].label} is fixed and forces det {d} onto the fixed term {L.terms[p - 1].label}."
                    )
                boundary_bases[p - 1] = boundary_bases[p - 1].scaled_first(1 / d)
                scales[p - 1] *= 1 / d
                s = s.scaled_first(1 / d)
            boundary_bases.append(img)
        sections.append(s)
    term_bases = tuple(
        boundary_bases[p].concat(sections[p]) if p in free else BasisList.standard(c.dim(p))
        for p in range(n + 1)
    )
    for p in free:
        if len(term_bases[p]) != c.dim(p):
            raise ExactnessError(f"Adapted basis of {L.terms[p].label} has the wrong size.")
    logger.debug(f"Adapted bases for free terms {[L.terms[p].label for p in free]}")
    return AdaptedBases(free, tuple(boundary_bases), tuple(sections), term_bases, raw, tuple(scales))


# --- Induced bases ---

def _realize(basis: BasisList, coordinates: Sequence[Vector]) -> BasisList:
    """Vectors whose coordinates in ``basis`` are ``coordinates``."""
    return BasisList(basis.ambient_dim, tuple(combine(v, basis.vectors, basis.ambient_dim) for v in coordinates))


def _replace_degree(h: GradedBases, q: int, basis: BasisList) -> GradedBases:
    return h.replace(q, basis) if q < len(h) else h


def induced_bases(L: LongExactSequence, adapted: AdaptedBases, absorb: str = "a") -> MVBases:
    """Turns the adapted term bases into homology bases of X, A, B and I.

    A free middle term is replaced by the split basis (h_A, 0) ⊔ (0, h_B) whose
    determinant matches the adapted one; the determinant lands on the first
    vector of the ``absorb`` side (the other side when that one is empty).
    """
    if absorb not in ("a", "b"):
        raise DecompositionError(f"absorb must be 'a' or 'b', got {absorb!r}.")
    x, a, b, i = L.bases.x, L.bases.a, L.bases.b, L.bases.i
    for p in adapted.free_terms:
        term = L.terms[p]
        q = term.degree
        coords = adapted.term_bases[p].vectors
        if not coords:
            continue
        if term.space == WHOLE:
            x = _replace_degree(x, q, _realize(x[q], coords))
        elif term.space == INTERSECTION:
            i = _replace_degree(i, q, _realize(i[q], coords))
        else:
            d = det(adapted.term_bases[p].as_matrix()) if coords else Fraction(1)
            sides = [("a", a), ("b", b)] if absorb == "a" else [("b", b), ("a", a)]
            target = next((name for name, h in sides if q < len(h) and len(h[q])), None)
            if target is None:
                continue
            if target == "a":
                a = a.scaled(q, 0, d)
            else:
                b = b.scaled(q, 0, d)
    return MVBases(x, a, b, i)


def normalize_fundamental_class(L: LongExactSequence) -> tuple[MVBases, Fraction]:
    """Rescales h_2(X) so that δ_2 sends it to the basis vector of H_1(I).

    Needs H_2(X) and H_1(I) to be one-dimensional.
    """
    try:
        p = L.term_index(WHOLE, 2)
    except KeyError as e:
        raise SurfaceError("The whole space has no second homology to normalize.") from e
    delta = L.complex.boundary(p)
    if delta.shape != (1, 1):
        raise OverdeterminedPatternError(f"δ_2 has shape {delta.shape}; normalization needs a 1x1 map.")
    c = delta[0, 0]
    x = L.bases.x.scaled(2, 0, 1 / c)
    return replace(L.bases, x=x), c


# --- Multiplicativity ---

def multiplicativity(dec: Decomposition, bases: MVBases, L: LongExactSequence | None = None,
                     convention: Convention = Convention.LITERAL) -> tuple[Fraction, Fraction]:
    """(T(A)·T(B), T(I)·T(X)·T(H)) for the given bases; equal in absolute value."""
    L = L or les(dec, bases)
    lhs = torsion(dec.a, bases.a, convention=convention).value * torsion(dec.b, bases.b, convention=convention).value
    rhs = (
        torsion(dec.i, bases.i, convention=convention).value
        * torsion(dec.x, bases.x, convention=convention).value
        * les_torsion(L, convention)
    )
    logger.debug(f"Multiplicativity: lhs={lhs}, rhs={rhs}")
    return lhs, rhs


@dataclass(frozen=True)
class AdaptedStep:
    """One Mayer-Vietoris step carried out with adapted bases."""
    sequence: LongExactSequence
    adapted: AdaptedBases
    bases: MVBases
    les_torsion: Fraction
    normalization: Fraction = Fraction(1)


def adapt_pieces(dec: Decomposition, x_basis: GradedBases | None = None, absorb: str = "a",
                 normalize_closed: bool = False) -> AdaptedStep:
    """Fixes X and I, solves for piece bases, and checks the sequence torsion is 1."""
    start = MVBases.standard(dec)
    if x_basis is not None:
        start = replace(start, x=x_basis)
    L = les(dec, start)
    c = Fraction(1)
    if normalize_closed:
        normalized, c = normalize_fundamental_class(L)
        L = les(dec, normalized, L.sequence)
    adapted = adapted_bases(L, L.terms_of([PIECES]))
    bases = induced_bases(L, adapted, absorb)
    final = les(dec, bases, L.sequence)
    value = les_torsion(final)
    if value != 1:
        raise ExactnessError(f"Sequence torsion with adapted piece bases is {value}, expected 1.")
    return AdaptedStep(final, adapted, bases, value, c)


def adapt_whole(dec: Decomposition, bases: MVBases | None = None) -> AdaptedStep:
    """Fixes A, B and I (standard bases unless given) and solves for the bases of X."""
    L = les(dec, bases)
    adapted = adapted_bases(L, L.terms_of([WHOLE]))
    bases = induced_bases(L, adapted)
    final = les(dec, bases, L.sequence)
    value = les_torsion(final)
    if value != 1:
        raise ExactnessError(f"Sequence torsion with adapted bases of X is {value}, expected 1.")
    return AdaptedStep(final, adapted, bases, value)
