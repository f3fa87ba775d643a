# services/complex.py
"""Finite based chain complexes and their homology with explicit bases."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from torsionkit.errors import ChainComplexError, NoSolutionError, ShapeError
from torsionkit.services.ratlin import (
    BasisList,
    RatMatrix,
    Vector,
    image_basis,
    kernel_basis,
    rank,
    solve,
)

logger = logging.getLogger(__name__)


def default_labels(dims: Sequence[int]) -> tuple[tuple[str, ...], ...]:
    return tuple(tuple(f"e{p}_{i}" for i in range(d)) for p, d in enumerate(dims))


@dataclass(frozen=True)
class BasedChainComplex:
    """C_n -> ... -> C_0 with the standard basis of each C_p as distinguished basis.

    ``boundaries[p - 1]`` is the matrix of ∂_p : C_p -> C_{p-1}.
    """
    dims: tuple[int, ...]
    boundaries: tuple[RatMatrix, ...] = ()
    labels: tuple[tuple[str, ...], ...] = field(default=None)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        if any(d < 0 for d in dims):
            raise ShapeError(f"Negative chain group dimension in {dims}.")
        if len(self.boundaries) != max(len(dims) - 1, 0):
            raise ShapeError(f"{len(dims)} chain groups need {max(len(dims) - 1, 0)} boundary maps, got {len(self.boundaries)}.")
        for p, m in enumerate(self.boundaries, start=1):
            if m.shape != (dims[p - 1], dims[p]):
                raise ShapeError(f"∂_{p} has shape {m.shape}, expected {(dims[p - 1], dims[p])}.")
        if self.labels is None:
            object.__setattr__(self, "labels", default_labels(dims))
        else:
            labels = tuple(tuple(str(s) for s in row) for row in self.labels)
            if [len(row) for row in labels] != list(dims):
                raise ShapeError("Cell labels do not match the chain group dimensions.")
            object.__setattr__(self, "labels", labels)

    @property
    def top_degree(self) -> int:
        return len(self.dims) - 1

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def dim(self, p: int) -> int:
        return self.dims[p] if 0 <= p <= self.top_degree else 0

    def boundary(self, p: int) -> RatMatrix:
        """∂_p, with degrees outside [1, n] treated as maps between zero spaces."""
        if 1 <= p <= self.top_degree:
            return self.boundaries[p - 1]
        return RatMatrix.zeros(self.dim(p - 1), self.dim(p))

    def label(self, p: int, i: int) -> str:
        return self.labels[p][i]

    def index_of(self, p: int, label: str) -> int:
        try:
            return self.labels[p].index(label)
        except ValueError as e:
            raise KeyError(f"No {p}-cell labelled {label!r}.") from e


@dataclass(frozen=True)
class HomologyData:
    cycles: tuple[BasisList, ...]
    boundaries: tuple[BasisList, ...]
    representatives: tuple[BasisList, ...]

    @property
    def betti(self) -> tuple[int, ...]:
        return tuple(len(h) for h in self.representatives)

    def betti_at(self, p: int) -> int:
        return len(self.representatives[p]) if 0 <= p < len(self.representatives) else 0

    def class_coordinates(self, p: int, z: Sequence[Fraction], basis: BasisList | None = None) -> Vector:
        """Coordinates of the class of the cycle ``z`` in ``basis`` (default: the representatives h_p)."""
        b = self.boundaries[p]
        h = self.representatives[p] if basis is None else basis
        try:
            coords = solve(b.concat(h).as_matrix(), z)
        except NoSolutionError as e:
            raise ChainComplexError(f"Vector is not a {p}-cycle.", degree=p) from e
        return coords[len(b):]


@dataclass(frozen=True)
class GradedBases:
    """A chosen basis of each H_p, stored as representative cycles in C_p."""
    representatives: tuple[BasisList, ...]

    def __getitem__(self, p: int) -> BasisList:
        return self.representatives[p]

    def __len__(self) -> int:
        return len(self.representatives)

    def replace(self, p: int, basis: BasisList) -> "GradedBases":
        reps = list(self.representatives)
        reps[p] = basis
        return GradedBases(tuple(reps))

    def scaled(self, p: int, i: int, factor) -> "GradedBases":
        basis = self.representatives[p]
        v = tuple(Fraction(factor) * a for a in basis[i])
        return self.replace(p, basis.with_vector(i, v))

    def permuted(self, p: int, order: Sequence[int]) -> "GradedBases":
        basis = self.representatives[p]
        return self.replace(p, BasisList(basis.ambient_dim, tuple(basis[i] for i in order)))


def standard_bases(homology_data: HomologyData) -> GradedBases:
    return GradedBases(homology_data.representatives)


# --- Operations ---

def validate(c: BasedChainComplex) -> None:
    """Raises ChainComplexError at the first degree where ∂∘∂ ≠ 0."""
    for p in range(2, c.top_degree + 1):
        composite = c.boundary(p - 1) @ c.boundary(p)
        if not composite.is_zero():
            raise ChainComplexError(f"∂_{p - 1}∘∂_{p} is not zero.", degree=p)


def is_valid(c: BasedChainComplex) -> bool:
    try:
        validate(c)
    except ChainComplexError:
        return False
    return True


def homology(c: BasedChainComplex) -> HomologyData:
    """Cycles, boundaries and canonical representatives in every degree.

    h_p is chosen greedily: walk Z_p's kernel basis in order and keep each
    vector that is independent of B_p and the vectors kept so far.
    """
    cycles, bounds, reps = [], [], []
    for p in range(c.top_degree + 1):
        z = kernel_basis(c.boundary(p))
        b = image_basis(c.boundary(p + 1))
        kept: list[Vector] = list(b.vectors)
        current_rank = len(kept)
        chosen = []
        for v in z:
            candidate = BasisList(c.dim(p), tuple(kept) + (v,))
            if rank(candidate.as_matrix()) > current_rank:
                kept.append(v)
                chosen.append(v)
                current_rank += 1
        cycles.append(z)
        bounds.append(b)
        reps.append(BasisList(c.dim(p), tuple(chosen)))
    data = HomologyData(tuple(cycles), tuple(bounds), tuple(reps))
    logger.debug(f"Homology computed: betti={data.betti}")
    return data


def direct_sum(c1: BasedChainComplex, c2: BasedChainComplex,
               prefixes: tuple[str, str] = ("A:", "B:")) -> BasedChainComplex:
    """Block-diagonal sum C1 ⊕ C2; C1's cells come first in every degree."""
    if c2.total_dim == 0 and c2.top_degree <= c1.top_degree:
        return c1
    if c1.total_dim == 0 and c1.top_degree <= c2.top_degree:
        return c2
    top = max(c1.top_degree, c2.top_degree)
    dims = tuple(c1.dim(p) + c2.dim(p) for p in range(top + 1))
    boundaries = tuple(c1.boundary(p).block_diag(c2.boundary(p)) for p in range(1, top + 1))
    labels = tuple(
        tuple(prefixes[0] + s for s in (c1.labels[p] if p <= c1.top_degree else ()))
        + tuple(prefixes[1] + s for s in (c2.labels[p] if p <= c2.top_degree else ()))
        for p in range(top + 1)
    )
    return BasedChainComplex(dims, boundaries, labels)


def euler_characteristic(c: BasedChainComplex) -> int:
    return sum((-1) ** p * d for p, d in enumerate(c.dims))


def is_chain_map(source: BasedChainComplex, target: BasedChainComplex, maps: Sequence[RatMatrix]) -> bool:
    """True when ``maps[p]`` : C_p -> D_p commute with the boundaries."""
    top = max(source.top_degree, target.top_degree)
    for p in range(top + 1):
        f = maps[p] if p < len(maps) else RatMatrix.zeros(target.dim(p), source.dim(p))
        if f.shape != (target.dim(p), source.dim(p)):
            return False
    for p in range(1, top + 1):
        f_p = maps[p] if p < len(maps) else RatMatrix.zeros(target.dim(p), source.dim(p))
        f_q = maps[p - 1]
        if target.boundary(p) @ f_p != f_q @ source.boundary(p):
            return False
    return True
