# tests/test_ratlin.py
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from torsionkit.errors import DependentBasisError, NoSolutionError, ShapeError
from torsionkit.services.ratlin import (
    BasisList,
    RatMatrix,
    change_of_basis_det,
    change_of_basis_matrix,
    det,
    image_basis,
    in_span,
    inverse,
    kernel_basis,
    rank,
    rref,
    solve,
    solve_many,
)

F = Fraction


def test_det_of_small_matrices():
    assert det(RatMatrix.from_rows([[1, 2], [3, 4]])) == -2
    assert det(RatMatrix.from_rows([[0, 1], [1, 0]])) == -1
    assert det(RatMatrix.from_rows([[F(1, 2), F(1, 3)], [F(1, 4), F(1, 5)]])) == F(1, 60)
    assert det(RatMatrix.zeros(0, 0)) == 1


def test_det_rejects_non_square():
    with pytest.raises(ShapeError):
        det(RatMatrix.zeros(2, 3))


def test_ragged_rows_rejected():
    with pytest.raises(ShapeError):
        RatMatrix.from_rows([[1, 2], [3]])


def test_rref_transform_reproduces_reduced_form():
    rng = np.random.default_rng(11)
    for _ in range(20):
        rows = [[int(rng.integers(-3, 4)) for _ in range(4)] for _ in range(3)]
        m = RatMatrix.from_rows(rows)
        r, pivots, t = rref(m)
        assert t @ m == r
        assert det(t) != 0
        for i, p in enumerate(pivots):
            assert r[i, p] == 1


def test_rank_and_pivots_of_dependent_rows():
    m = RatMatrix.from_rows([[1, 2, 3], [2, 4, 6]])
    assert rank(m) == 1
    assert rref(m)[1] == [0]


def test_kernel_basis_follows_free_columns():
    kernel = kernel_basis(RatMatrix.from_rows([[1, 2, 3]]))
    assert kernel.vectors == ((F(-2), F(1), F(0)), (F(-3), F(0), F(1)))


def test_image_basis_uses_first_independent_columns():
    image = image_basis(RatMatrix.from_rows([[1, 2], [2, 4]]))
    assert image.vectors == ((F(1), F(2)),)


def test_solve_returns_canonical_solution():
    assert solve(RatMatrix.from_rows([[1, 1]]), [2]) == (F(2), F(0))
    assert solve_many(RatMatrix.from_rows([[2, 0], [0, 4]]), [[1, 1], [2, 0]]) == [(F(1, 2), F(1, 4)), (F(1), F(0))]


def test_solve_outside_image_raises():
    with pytest.raises(NoSolutionError):
        solve(RatMatrix.from_rows([[1], [1]]), [1, 2])


def test_in_span():
    assert in_span([(1, 1)], (3, 3), 2)
    assert not in_span([(1, 1)], (1, 0), 2)
    assert in_span([], (0, 0), 2)


def test_inverse_and_singular_matrix():
    assert inverse(RatMatrix.from_rows([[2, 0], [0, 4]])) == RatMatrix.from_rows([[F(1, 2), 0], [0, F(1, 4)]])
    with pytest.raises(DependentBasisError):
        inverse(RatMatrix.from_rows([[1, 2], [2, 4]]))


def test_change_of_basis():
    standard = BasisList.standard(2)
    assert change_of_basis_det(BasisList(2, ((2, 0), (0, 3))), standard) == 6
    assert change_of_basis_det(BasisList(2, ((1, 1), (1, -1))), standard) == -2
    m = change_of_basis_matrix(standard, BasisList(2, ((1, 1), (1, -1))))
    assert m == RatMatrix.from_rows([[F(1, 2), F(1, 2)], [F(1, 2), F(-1, 2)]])


def test_change_of_basis_rejects_dependent_vectors():
    with pytest.raises(DependentBasisError):
        change_of_basis_det(BasisList(2, ((1, 1), (2, 2))), BasisList.standard(2))
    with pytest.raises(ShapeError):
        change_of_basis_matrix(BasisList.standard(2), BasisList.standard(3))


def test_basis_list_helpers():
    basis = BasisList(2, ((1, 2), (3, 4)))
    assert basis.scaled_first(F(1, 2))[0] == (F(1, 2), F(1))
    assert basis.concat(BasisList(2, ((5, 6),))).vectors[-1] == (F(5), F(6))
    assert basis.as_matrix() == RatMatrix.from_rows([[1, 3], [2, 4]])
    with pytest.raises(ShapeError):
        BasisList(3, ((1, 2),))


def cofactor_det(rows):
    if not rows:
        return F(1)
    return sum(
        (-1) ** j * rows[0][j] * cofactor_det([r[:j] + r[j + 1:] for r in rows[1:]])
        for j in range(len(rows))
        if rows[0][j] != 0
    )


def random_rows(rng, n_rows, n_cols, low=-4, high=5):
    return [[F(int(rng.integers(low, high)), int(rng.integers(1, 4))) for _ in range(n_cols)] for _ in range(n_rows)]


def random_basis(rng, n):
    while True:
        rows = random_rows(rng, n, n)
        if cofactor_det(rows) != 0:
            return BasisList(n, tuple(tuple(r) for r in rows))


def test_det_matches_cofactor_expansion():
    rng = np.random.default_rng(5)
    for _ in range(60):
        n = int(rng.integers(1, 6))
        rows = random_rows(rng, n, n)
        assert det(RatMatrix.from_rows(rows)) == cofactor_det(rows)


def test_rank_nullity():
    rng = np.random.default_rng(8)
    for _ in range(30):
        n_rows, n_cols = int(rng.integers(1, 6)), int(rng.integers(1, 7))
        m = RatMatrix.from_rows(random_rows(rng, n_rows, n_cols, -1, 2))
        kernel, image = kernel_basis(m), image_basis(m)
        assert kernel.is_independent() and image.is_independent()
        assert len(kernel) + len(image) == n_cols
        assert all(v == (0,) * n_rows for v in (m.apply(k) for k in kernel))


def test_rref_of_five_by_seven_rank_three():
    rng = np.random.default_rng(3)
    identity = [[F(int(i == j)) for j in range(3)] for i in range(3)]
    left = RatMatrix.from_rows(identity + random_rows(rng, 2, 3))
    right = RatMatrix.from_rows([identity[i] + row for i, row in enumerate(random_rows(rng, 3, 4))])
    m = left @ right
    rows = [list(r) for r in m.to_rows()]

    def minor_rank(k):
        return any(
            cofactor_det([[rows[i][j] for j in cols] for i in picked]) != 0
            for picked in combinations(range(5), k)
            for cols in combinations(range(7), k)
        )

    assert minor_rank(3) and not minor_rank(4)
    r, pivots, t = rref(m)
    assert t @ m == r
    assert rank(m) == len(pivots) == 3
    assert pivots == [0, 1, 2]


def test_change_of_basis_examples():
    old = BasisList(3, ((1, 2, 0), (0, 1, 1), (1, 0, 1)))
    assert change_of_basis_det(old, old) == 1
    assert change_of_basis_det(old.scaled_first(2), old) == 2
    swapped = BasisList(3, (old[1], old[0], old[2]))
    assert change_of_basis_det(swapped, old) == -1


def test_change_of_basis_chain_rule():
    rng = np.random.default_rng(13)
    for _ in range(10):
        a, b, c = (random_basis(rng, 3) for _ in range(3))
        assert change_of_basis_det(a, b) * change_of_basis_det(b, c) == change_of_basis_det(a, c)
