# services/ratlin.py
"""Exact dense linear algebra over the rationals.

``RatMatrix`` stores ``fractions.Fraction`` entries; elimination, kernels,
images, determinants and inverses are computed by sympy over ``Rational``.
Pivots are the first nonzero columns, so kernels, images and canonical
solutions are reproducible across runs.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import sympy

from torsionkit.errors import DependentBasisError, NoSolutionError, ShapeError

logger = logging.getLogger(__name__)

Rational = Fraction
Vector = tuple[Fraction, ...]


def to_fraction(value) -> Fraction:
    """sympy Rational (or anything Fraction accepts) to Fraction."""
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    return Fraction(value)


def as_vector(values: Iterable) -> Vector:
    return tuple(Fraction(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(1 if k == i else 0) for k in range(n))


def add_vectors(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def scale_vector(c: Fraction, v: Sequence[Fraction]) -> Vector:
    return tuple(c * a for a in v)


def combine(coefficients: Sequence[Fraction], vectors: Sequence[Sequence[Fraction]], dim: int) -> Vector:
    """Returns sum_i coefficients[i] * vectors[i] in a space of dimension ``dim``."""
    out = [Fraction(0)] * dim
    for c, v in zip(coefficients, vectors):
        if c == 0:
            continue
        for k, a in enumerate(v):
            out[k] += c * a
    return tuple(out)


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ShapeError(f"Negative matrix shape {self.rows}x{self.cols}.")
        if len(self.entries) != self.rows * self.cols:
            raise ShapeError(
                f"Matrix {self.rows}x{self.cols} needs {self.rows * self.cols} entries, got {len(self.entries)}."
            )
        object.__setattr__(self, "entries", tuple(Fraction(e) for e in self.entries))

    # --- Constructors ---
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ShapeError(f"Ragged rows: expected {cols} columns, got {len(r)}.")
        return cls(len(rows), cols, tuple(Fraction(e) for r in rows for e in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> "RatMatrix":
        for c in columns:
            if len(c) != rows:
                raise ShapeError(f"Column of length {len(c)} in a matrix with {rows} rows.")
        return cls(rows, len(columns), tuple(Fraction(columns[j][i]) for i in range(rows) for j in range(len(columns))))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, tuple(Fraction(1 if i == j else 0) for i in range(n) for j in range(n)))

    # --- Access ---
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def is_square(self) -> bool:
        return self.rows == self.cols

    # --- Arithmetic ---
    def transpose(self) -> "RatMatrix":
        return RatMatrix.from_columns(self.to_rows(), self.cols) if self.rows else RatMatrix.zeros(self.cols, 0)

    def apply(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.cols:
            raise ShapeError(f"Cannot apply a {self.rows}x{self.cols} matrix to a vector of length {len(v)}.")
        return tuple(
            sum((self.entries[i * self.cols + j] * v[j] for j in range(self.cols) if v[j] != 0), Fraction(0))
            for i in range(self.rows)
        )

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ShapeError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}.")
        if 0 in (self.rows, self.cols, other.cols):
            return RatMatrix.zeros(self.rows, other.cols)
        return RatMatrix.from_sympy(self.to_sympy() * other.to_sympy())

    # --- sympy bridge ---
    def to_sympy(self) -> sympy.Matrix:
        return sympy.Matrix(self.rows, self.cols, [sympy.Rational(e.numerator, e.denominator) for e in self.entries])

    @classmethod
    def from_sympy(cls, m: sympy.MatrixBase) -> "RatMatrix":
        return cls(m.rows, m.cols, tuple(to_fraction(e) for e in m))

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ShapeError(f"Cannot add {self.shape} and {other.shape}.")
        return RatMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scaled(self, c) -> "RatMatrix":
        c = Fraction(c)
        return RatMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "RatMatrix":
        return RatMatrix(len(row_idx), len(col_idx), tuple(self[i, j] for i in row_idx for j in col_idx))

    def hstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows:
            raise ShapeError(f"Cannot hstack {self.shape} and {other.shape}.")
        return RatMatrix(self.rows, self.cols + other.cols,
                         tuple(e for i in range(self.rows) for e in self.row(i) + other.row(i)))

    def vstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.cols:
            raise ShapeError(f"Cannot vstack {self.shape} and {other.shape}.")
        return RatMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def block_diag(self, other: "RatMatrix") -> "RatMatrix":
        top = self.hstack(RatMatrix.zeros(self.rows, other.cols))
        bottom = RatMatrix.zeros(other.rows, self.cols).hstack(other)
        return top.vstack(bottom)


@dataclass(frozen=True)
class BasisList:
    """An ordered list of coordinate vectors in a space of dimension ``ambient_dim``."""
    ambient_dim: int
    vectors: tuple[Vector, ...] = ()

    def __post_init__(self):
        vectors = tuple(as_vector(v) for v in self.vectors)
        for v in vectors:
            if len(v) != self.ambient_dim:
                raise ShapeError(f"Vector of length {len(v)} in a basis of ambient dimension {self.ambient_dim}.")
        object.__setattr__(self, "vectors", vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i: int) -> Vector:
        return self.vectors[i]

    def as_matrix(self) -> RatMatrix:
        """Matrix whose columns are the vectors."""
        return RatMatrix.from_columns(self.vectors, self.ambient_dim)

    def is_independent(self) -> bool:
        return rank(self.as_matrix()) == len(self.vectors)

    def concat(self, *others: "BasisList") -> "BasisList":
        vectors = list(self.vectors)
        for other in others:
            if other.ambient_dim != self.ambient_dim:
                raise ShapeError("Cannot concatenate bases of different ambient dimension.")
            vectors.extend(other.vectors)
        return BasisList(self.ambient_dim, tuple(vectors))

    def with_vector(self, i: int, v: Sequence[Fraction]) -> "BasisList":
        vectors = list(self.vectors)
        vectors[i] = as_vector(v)
        return BasisList(self.ambient_dim, tuple(vectors))

    def scaled_first(self, c) -> "BasisList":
        """Copy with the first vector multiplied by ``c`` (no-op on an empty list)."""
        if not self.vectors:
            return self
        return self.with_vector(0, scale_vector(Fraction(c), self.vectors[0]))

    @classmethod
    def standard(cls, n: int) -> "BasisList":
        return cls(n, tuple(unit_vector(n, i) for i in range(n)))


# --- Elimination ---

def rref(m: RatMatrix) -> tuple[RatMatrix, list[int], RatMatrix]:
    """Gauss-Jordan elimination.

    Returns ``(R, pivot_cols, T)`` with ``T @ m == R``, ``R`` in reduced row
    echelon form and ``T`` invertible. ``[m | I]`` is reduced in one pass and
    split, so ``T`` is the right block.
    """
    if m.rows == 0:
        return m, [], RatMatrix.zeros(0, 0)
    reduced, pivots = m.to_sympy().row_join(sympy.eye(m.rows)).rref()
    return (
        RatMatrix.from_sympy(reduced[:, :m.cols]),
        [p for p in pivots if p < m.cols],
        RatMatrix.from_sympy(reduced[:, m.cols:]),
    )


def rank(m: RatMatrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return m.to_sympy().rank()


def _column_vector(column: sympy.MatrixBase) -> Vector:
    return tuple(to_fraction(e) for e in column)


def kernel_basis(m: RatMatrix) -> BasisList:
    """Null space basis, one vector per free column in increasing column order.

    The free coordinate is 1 and the other free coordinates are 0.
    """
    if m.cols == 0:
        return BasisList(0)
    if m.rows == 0:
        return BasisList.standard(m.cols)
    return BasisList(m.cols, tuple(_column_vector(v) for v in m.to_sympy().nullspace()))


def image_basis(m: RatMatrix) -> BasisList:
    """Column space basis made of the first independent columns of ``m``."""
    if m.rows == 0 or m.cols == 0:
        return BasisList(m.rows)
    return BasisList(m.rows, tuple(_column_vector(v) for v in m.to_sympy().columnspace()))


def solve(m: RatMatrix, b: Sequence[Fraction]) -> Vector:
    """Canonical solution of ``m x = b`` with every non-pivot coordinate zero.

    Raises NoSolutionError when ``b`` is not in the column space.
    """
    if len(b) != m.rows:
        raise ShapeError(f"Right-hand side of length {len(b)} for a matrix with {m.rows} rows.")
    r, pivots, t = rref(m)
    c = t.apply(as_vector(b))
    if any(c[i] != 0 for i in range(len(pivots), m.rows)):
        raise NoSolutionError("Right-hand side is not in the image of the matrix.")
    x = [Fraction(0)] * m.cols
    for i, p in enumerate(pivots):
        x[p] = c[i]
    return tuple(x)


def solve_many(m: RatMatrix, rhs: Sequence[Sequence[Fraction]]) -> list[Vector]:
    """Canonical solutions for several right-hand sides, sharing one elimination."""
    r, pivots, t = rref(m)
    out = []
    for b in rhs:
        if len(b) != m.rows:
            raise ShapeError(f"Right-hand side of length {len(b)} for a matrix with {m.rows} rows.")
        c = t.apply(as_vector(b))
        if any(c[i] != 0 for i in range(len(pivots), m.rows)):
            raise NoSolutionError("Right-hand side is not in the image of the matrix.")
        x = [Fraction(0)] * m.cols
        for i, p in enumerate(pivots):
            x[p] = c[i]
        out.append(tuple(x))
    return out


def in_span(vectors: Sequence[Sequence[Fraction]], v: Sequence[Fraction], dim: int) -> bool:
    if not vectors:
        return all(a == 0 for a in v)
    try:
        solve(RatMatrix.from_columns(vectors, dim), v)
    except NoSolutionError:
        return False
    return True


def det(m: RatMatrix) -> Fraction:
    """Exact determinant; the empty matrix has determinant 1."""
    if not m.is_square():
        raise ShapeError(f"Determinant of a non-square {m.rows}x{m.cols} matrix.")
    if m.rows == 0:
        return Fraction(1)
    return to_fraction(m.to_sympy().det(method="berkowitz"))


def inverse(m: RatMatrix) -> RatMatrix:
    if not m.is_square():
        raise ShapeError(f"Inverse of a non-square {m.rows}x{m.cols} matrix.")
    if m.rows == 0:
        return m
    if det(m) == 0:
        raise DependentBasisError("Matrix is singular.")
    return RatMatrix.from_sympy(m.to_sympy().inv())


def change_of_basis_matrix(new: BasisList, old: BasisList) -> RatMatrix:
    """Matrix whose j-th column holds the coordinates of ``new[j]`` in ``old``."""
    if len(new) != len(old) or new.ambient_dim != old.ambient_dim:
        raise ShapeError(
            f"Change of basis between {len(new)} vectors in dim {new.ambient_dim} "
            f"and {len(old)} vectors in dim {old.ambient_dim}."
        )
    if not old.is_independent():
        raise DependentBasisError("Reference basis is linearly dependent.")
    if not new:
        return RatMatrix.zeros(0, 0)
    try:
        cols = solve_many(old.as_matrix(), new.vectors)
    except NoSolutionError as e:
        raise DependentBasisError("New vectors do not lie in the span of the reference basis.") from e
    return RatMatrix.from_columns(cols, len(old))


def change_of_basis_det(new: BasisList, old: BasisList) -> Fraction:
    """The determinant ``[new, old]`` of the change-of-basis matrix; never zero."""
    d = det(change_of_basis_matrix(new, old)) if len(new) else Fraction(1)
    if d == 0:
        raise DependentBasisError("New vectors are linearly dependent.")
    return d
