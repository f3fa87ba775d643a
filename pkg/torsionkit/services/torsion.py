# services/torsion.py
"""Reidemeister-Franz torsion of based chain complexes.

The degree-p factor is the determinant of ``b_p ⊔ ℓ_p(h_p) ⊔ s_p(b_{p-1})``
against the cell basis, raised to ``(-1)^(p+1)`` (literal convention) or
``(-1)^p`` (reciprocal convention).
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from torsionkit.config import get_settings
from torsionkit.errors import (
    InvalidChoicesError,
    NotAcyclicError,
    OversizeError,
    ShapeError,
)
from torsionkit.services.complex import BasedChainComplex, GradedBases, HomologyData, direct_sum, homology
from torsionkit.services.ratlin import (
    BasisList,
    RatMatrix,
    Vector,
    add_vectors,
    combine,
    in_span,
    solve_many,
    to_fraction,
    zero_vector,
)
from torsionkit.services.ratlin import det as rat_det

logger = logging.getLogger(__name__)


class Convention(str, Enum):
    LITERAL = "literal"
    RECIPROCAL = "reciprocal"

    def exponent(self, p: int) -> int:
        return (-1) ** (p + 1) if self is Convention.LITERAL else (-1) ** p


@dataclass(frozen=True)
class TorsionValue:
    value: Fraction
    degree_factors: tuple[Fraction, ...] = ()
    convention: Convention = Convention.LITERAL

    def __post_init__(self):
        if self.value == 0:
            raise InvalidChoicesError("Torsion is never zero; the assembled vectors are dependent.")

    @property
    def abs_value(self) -> Fraction:
        return abs(self.value)

    def reciprocal(self) -> "TorsionValue":
        other = Convention.RECIPROCAL if self.convention is Convention.LITERAL else Convention.LITERAL
        return TorsionValue(1 / self.value, self.degree_factors, other)


@dataclass(frozen=True)
class TorsionChoices:
    """Per-degree bases of B_p, sections and lift offsets.

    ``sections[p]`` holds s_p(b_{p-1}): one preimage in C_p per vector of
    ``boundary_bases[p - 1]``. ``lift_offsets[p]`` holds boundaries added to
    the h_p representatives, one per homology basis vector.
    """
    boundary_bases: tuple[BasisList, ...]
    sections: tuple[BasisList, ...]
    lift_offsets: tuple[tuple[Vector, ...], ...]

    def lift(self, p: int, h: BasisList) -> BasisList:
        offsets = self.lift_offsets[p] if p < len(self.lift_offsets) else ()
        if not offsets:
            return h
        if len(offsets) != len(h):
            raise InvalidChoicesError(f"{len(offsets)} lift offsets for {len(h)} homology vectors in degree {p}.")
        return BasisList(h.ambient_dim, tuple(add_vectors(v, o) for v, o in zip(h, offsets)))


# --- Choices ---

def default_choices(c: BasedChainComplex, data: HomologyData | None = None) -> TorsionChoices:
    data = data or homology(c)
    boundary_bases = tuple(data.boundaries)
    sections = []
    for p in range(c.top_degree + 1):
        lower = boundary_bases[p - 1] if p >= 1 else BasisList(0)
        vectors = solve_many(c.boundary(p), lower.vectors) if len(lower) else []
        sections.append(BasisList(c.dim(p), tuple(vectors)))
    offsets = tuple(tuple(zero_vector(c.dim(p)) for _ in data.representatives[p]) for p in range(c.top_degree + 1))
    return TorsionChoices(boundary_bases, tuple(sections), offsets)


def _random_invertible(rng: np.random.Generator, n: int) -> RatMatrix:
    """L @ U with unit lower L and an upper U whose diagonal avoids zero."""
    low = [[Fraction(int(rng.integers(-3, 4))) if i > j else Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    diagonal = [-3, -2, -1, 1, 2, 3]
    up = [[Fraction(int(rng.integers(-3, 4))) if j > i else Fraction(0) for j in range(n)] for i in range(n)]
    for i in range(n):
        up[i][i] = Fraction(diagonal[int(rng.integers(0, len(diagonal)))], int(rng.integers(1, 3)))
    return RatMatrix.from_rows(low, n) @ RatMatrix.from_rows(up, n)


def _random_combination(rng: np.random.Generator, basis: BasisList) -> Vector:
    coefficients = [Fraction(int(rng.integers(-2, 3))) for _ in basis]
    return combine(coefficients, basis.vectors, basis.ambient_dim)


def random_choices(c: BasedChainComplex, data: HomologyData | None = None, seed: int = 0) -> TorsionChoices:
    """Valid choices drawn from ``numpy.random.default_rng(seed)``; identical per seed."""
    data = data or homology(c)
    rng = np.random.default_rng(seed)
    boundary_bases = []
    for p in range(c.top_degree + 1):
        b = data.boundaries[p]
        if not len(b):
            boundary_bases.append(b)
            continue
        m = b.as_matrix() @ _random_invertible(rng, len(b))
        boundary_bases.append(BasisList(b.ambient_dim, tuple(m.columns())))
    sections = []
    for p in range(c.top_degree + 1):
        lower = boundary_bases[p - 1] if p >= 1 else BasisList(0)
        base = solve_many(c.boundary(p), lower.vectors) if len(lower) else []
        sections.append(BasisList(c.dim(p), tuple(add_vectors(v, _random_combination(rng, data.cycles[p])) for v in base)))
    offsets = tuple(
        tuple(_random_combination(rng, data.boundaries[p]) for _ in data.representatives[p])
        for p in range(c.top_degree + 1)
    )
    logger.debug(f"Random torsion choices drawn with seed {seed}")
    return TorsionChoices(tuple(boundary_bases), tuple(sections), offsets)


def validate_choices(c: BasedChainComplex, choices: TorsionChoices) -> None:
    n = c.top_degree
    if len(choices.boundary_bases) != n + 1 or len(choices.sections) != n + 1:
        raise InvalidChoicesError(f"Choices cover {len(choices.boundary_bases)} degrees, complex has {n + 1}.")
    for p in range(n + 1):
        b = choices.boundary_bases[p]
        if b.ambient_dim != c.dim(p) or any(not in_span(c.boundary(p + 1).columns(), v, c.dim(p)) for v in b):
            raise InvalidChoicesError(f"b_{p} is not contained in B_{p}.")
        lower = choices.boundary_bases[p - 1] if p >= 1 else BasisList(0)
        s = choices.sections[p]
        if len(s) != len(lower):
            raise InvalidChoicesError(f"s_{p} has {len(s)} vectors for {len(lower)} vectors of b_{p - 1}.")
        for v, target in zip(s, lower):
            if c.boundary(p).apply(v) != target:
                raise InvalidChoicesError(f"s_{p} is not a section of ∂_{p}.")
        for o in (choices.lift_offsets[p] if p < len(choices.lift_offsets) else ()):
            if not in_span(c.boundary(p + 1).columns(), o, c.dim(p)):
                raise InvalidChoicesError(f"Lift offset in degree {p} is not a boundary.")


def _check_homology_bases(c: BasedChainComplex, h: GradedBases, data: HomologyData) -> None:
    for p in range(c.top_degree + 1):
        basis = h[p] if p < len(h) else BasisList(c.dim(p))
        if len(basis) != data.betti_at(p):
            raise ShapeError(f"h_{p} has {len(basis)} vectors, H_{p} has dimension {data.betti_at(p)}.")
        for v in basis:
            if any(a != 0 for a in c.boundary(p).apply(v)):
                raise InvalidChoicesError(f"h_{p} contains a vector that is not a cycle.")


# --- Torsion ---

def torsion(c: BasedChainComplex, h: GradedBases, choices: TorsionChoices | None = None,
            convention: Convention = Convention.LITERAL, data: HomologyData | None = None) -> TorsionValue:
    data = data or homology(c)
    choices = choices or default_choices(c, data)
    _check_homology_bases(c, h, data)
    validate_choices(c, choices)
    value = Fraction(1)
    factors = []
    for p in range(c.top_degree + 1):
        hp = h[p] if p < len(h) else BasisList(c.dim(p))
        assembled = choices.boundary_bases[p].concat(choices.lift(p, hp), choices.sections[p])
        if len(assembled) != c.dim(p):
            raise InvalidChoicesError(f"Degree {p}: assembled set has {len(assembled)} vectors, C_{p} has dimension {c.dim(p)}.")
        d = rat_det(assembled.as_matrix()) if len(assembled) else Fraction(1)
        if d == 0:
            raise InvalidChoicesError(f"Degree {p}: b ⊔ ℓ(h) ⊔ s(b) is not a basis of C_{p}.")
        factors.append(d)
        value *= d ** convention.exponent(p)
    logger.debug(f"Torsion {value} from degree factors {[str(f) for f in factors]}")
    return TorsionValue(value, tuple(factors), convention)


def torsion_acyclic(c: BasedChainComplex, choices: TorsionChoices | None = None,
                    convention: Convention = Convention.LITERAL) -> TorsionValue:
    data = homology(c)
    if any(data.betti):
        raise NotAcyclicError(f"Complex is not acyclic: betti numbers {data.betti}.")
    empty = GradedBases(tuple(BasisList(c.dim(p)) for p in range(c.top_degree + 1)))
    return torsion(c, empty, choices, convention, data)


# --- Oracle ---

def _sympy_columns(vectors: Sequence[Vector], dim: int) -> sympy.Matrix:
    entries = [Fraction(vectors[j][i]) for i in range(dim) for j in range(len(vectors))]
    return sympy.Matrix(dim, len(vectors), [sympy.Rational(e.numerator, e.denominator) for e in entries])


def _oracle_rank(vectors: Sequence[Vector], dim: int) -> int:
    return _sympy_columns(vectors, dim).rank() if vectors and dim else 0


def _oracle_det(vectors: Sequence[Vector], dim: int) -> Fraction:
    if dim == 0:
        return Fraction(1)
    return to_fraction(_sympy_columns(vectors, dim).det(method="bareiss"))


def torsion_oracle(c: BasedChainComplex, h: GradedBases,
                   convention: Convention = Convention.LITERAL) -> TorsionValue:
    """Torsion through cell-subset sections and sympy Bareiss determinants.

    In each degree the sections are the first (lexicographic) subset of cells
    whose boundaries form a basis of the boundary space below; the boundary
    bases are those boundaries. Shares no elimination code with ``torsion``,
    which goes through ``ratlin``.
    """
    limit = get_settings().oracle_max_dim
    if c.total_dim > limit:
        raise OversizeError(f"Oracle is limited to total dimension {limit}, complex has {c.total_dim}.")
    n = c.top_degree
    chosen: list[tuple[int, ...]] = []
    for p in range(n + 1):
        below = c.dim(p - 1) if p > 0 else 0
        images = [c.boundary(p).column(j) for j in range(c.dim(p))]
        target = _oracle_rank(images, below)
        subset = ()
        for combo in itertools.combinations(range(c.dim(p)), target):
            if _oracle_rank([images[j] for j in combo], below) == target:
                subset = combo
                break
        chosen.append(subset)
    value = Fraction(1)
    factors = []
    for p in range(n + 1):
        above = chosen[p + 1] if p < n else ()
        b = [c.boundary(p + 1).column(j) for j in above]
        hp = list(h[p]) if p < len(h) else []
        s = [tuple(Fraction(int(k == j)) for k in range(c.dim(p))) for j in chosen[p]]
        columns = b + hp + s
        if len(columns) != c.dim(p):
            raise ShapeError(f"Degree {p}: {len(columns)} vectors for C_{p} of dimension {c.dim(p)}.")
        d = _oracle_det(columns, c.dim(p))
        if d == 0:
            raise InvalidChoicesError(f"Degree {p}: homology vectors are not independent modulo boundaries.")
        factors.append(d)
        value *= d ** convention.exponent(p)
    return TorsionValue(value, tuple(factors), convention)


# --- Direct sums ---

def direct_sum_bases(c1: BasedChainComplex, c2: BasedChainComplex, h1: GradedBases, h2: GradedBases) -> GradedBases:
    """The basis (h1, 0) ⊔ (0, h2) of H_*(C1 ⊕ C2)."""
    top = max(c1.top_degree, c2.top_degree)
    out = []
    for p in range(top + 1):
        d1, d2 = c1.dim(p), c2.dim(p)
        left = [tuple(v) + zero_vector(d2) for v in (h1[p] if p < len(h1) else ())]
        right = [zero_vector(d1) + tuple(v) for v in (h2[p] if p < len(h2) else ())]
        out.append(BasisList(d1 + d2, tuple(left + right)))
    return GradedBases(tuple(out))


def torsion_of_direct_sum(c1: BasedChainComplex, h1: GradedBases, c2: BasedChainComplex, h2: GradedBases,
                          convention: Convention = Convention.LITERAL) -> TorsionValue:
    """Torsion of C1 ⊕ C2 with the basis (h1, 0) ⊔ (0, h2); in absolute value the product of the two torsions."""
    return torsion(direct_sum(c1, c2), direct_sum_bases(c1, c2, h1, h2), convention=convention)
