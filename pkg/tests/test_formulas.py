# tests/test_formulas.py
from fractions import Fraction
from math import prod

import pytest

from torsionkit.errors import CalculatorError, SurfaceError
from torsionkit.services import formulas
from torsionkit.services.complex import GradedBases, homology
from torsionkit.services.pairing import fundamental_class
from torsionkit.services.ratlin import BasisList
from torsionkit.services.surf import cylinder, surface
from torsionkit.services.torsion import Convention, torsion

F = Fraction


def test_thm1_default_pipeline():
    report = formulas.thm1_verify()
    assert report.equal
    assert report.holds
    assert report.witness["whole_torsion"] == str(report.lhs)
    assert report.witness["canonical"] == {"det_period": "1", "det_delta": "1", "whole_torsion": "1"}
    assert report.witness["rhs_orientation"] == "det_period/det_delta"
    assert report.rhs == abs(F(report.witness["det_period"]) / F(report.witness["det_delta"]))


@pytest.mark.parametrize("seed", range(5))
def test_thm1_with_rescaled_pants_basis(seed):
    report = formulas.thm1_verify(seed=seed, rescale=True)
    assert report.holds, report.checks
    assert report.witness["rescale_factors"]


def test_thm1_orientations_are_reciprocal():
    report = formulas.thm1_verify(seed=3, rescale=True)
    reciprocal = report.witness["reciprocal"]
    assert F(reciprocal["lhs"]) == 1 / report.lhs
    assert F(reciprocal["rhs"]) == 1 / report.rhs


@pytest.mark.parametrize("g, n", [(2, 0), (2, 1), (2, 2), (3, 0), (3, 1)])
def test_thm2_grid(g, n):
    report = formulas.thm2_verify(g, n)
    assert report.equal
    assert report.holds, report.checks
    assert report.witness["factor_count"] == 2 * g - 2 + n


@pytest.mark.parametrize("g, n", [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2)])
def test_thm2_small_surfaces(g, n):
    report = formulas.thm2_verify(g, n, seed=1)
    assert report.holds
    assert len(report.witness["pants_factors"]) == 2 * g - 2 + n


def test_thm2_basis_covariance():
    plain = formulas.walk_pants(2, 1)
    scaled = formulas.walk_pants(2, 1, scale=F(3))
    lhs_plain = torsion(plain.surface.complex, plain.basis).abs_value
    lhs_scaled = torsion(scaled.surface.complex, scaled.basis).abs_value
    rhs_plain = prod(plain.pants_factors)
    rhs_scaled = prod(scaled.pants_factors)
    assert lhs_scaled == 3 * lhs_plain
    assert rhs_scaled == 3 * rhs_plain


def test_thm2_is_deterministic():
    assert formulas.thm2_verify(3, 1, seed=7).witness == formulas.thm2_verify(3, 1, seed=7).witness


def test_thm2_rejects_bad_parameters():
    with pytest.raises(SurfaceError):
        formulas.thm2_verify(1, 0)


@pytest.mark.parametrize("g", [2, 3])
def test_case3(g):
    report = formulas.case3_verify(g)
    assert report.holds
    assert report.lhs > 0 and report.rhs > 0


def test_case3_needs_genus_two():
    with pytest.raises(SurfaceError):
        formulas.case3_verify(1)


def test_mv_steps():
    report = formulas.mv_verify(2, 1)
    assert report.holds
    assert len(report.witness["steps"]) == 4


def test_independence_on_cylinder():
    report = formulas.independence_verify(cylinder().complex, trials=10, seed=4)
    assert report.holds
    assert report.lhs == 1
    assert report.witness["mismatched_seeds"] == []


def test_period_prediction():
    for g in (2, 3):
        assert formulas.period_verify(g, seed=g).holds


def test_double_3mfd_torsion():
    assert formulas.double_3mfd_torsion([[1, 1]], 1) == 1
    assert formulas.double_3mfd_torsion([[2, 3], [5, 7, 1, 1]], 11) == 2310
    assert formulas.double_3mfd_torsion([[F(-1, 2), 4]], F(1, 3)) == F(2, 3)


@pytest.mark.parametrize(
    "pants_torsions, mv",
    [([], 1), ([[]], 1), ([[1, 1]], 0), ([[1, 0]], 1), ([[1, 1, 1]], 1)],
)
def test_double_3mfd_torsion_rejects(pants_torsions, mv):
    with pytest.raises(CalculatorError):
        formulas.double_3mfd_torsion(pants_torsions, mv)


def test_handlebody_matches_boundary_surface():
    for g in (2, 3):
        walk = formulas.walk_pants(g, 0)
        boundary = torsion(walk.surface.complex, walk.basis).abs_value
        assert formulas.handlebody_torsion_squared(walk.pants_factors) == boundary


def test_product_manifold_torsion():
    assert formulas.product_manifold_torsion(1, 1, 2, -2, 1) == 1
    assert formulas.product_manifold_torsion(2, 3, 2, -2, 5) == F(45, 4)
    assert formulas.product_manifold_torsion_from_pants(2, [3, 5], 2, -2, 1) == F(225, 4)
    with pytest.raises(CalculatorError):
        formulas.product_manifold_torsion(0, 1, 2, -2, 1)
    with pytest.raises(CalculatorError):
        formulas.product_manifold_torsion_from_pants(2, [3], 2, -2, 1)


def test_calculators_report():
    report = formulas.calculators_verify(seed=0, trials=25)
    assert report.holds
    assert report.witness["failed_trials"] == []
    assert report.checks["disjoint_union"]
    boundaries = [F(h["boundary_torsion"]) for h in report.witness["handlebodies"]]
    assert F(report.witness["disjoint_union_torsion"]) == prod(boundaries)


def test_closed_surface_torsion_matches_direct_computation():
    x, _ = surface(2, 0)
    data = homology(x.complex)
    fundamental = fundamental_class(x)
    h = GradedBases((data.representatives[0], data.representatives[1], BasisList(len(fundamental), (fundamental,))))
    h = h.scaled(2, 0, F(-3, 2)).scaled(1, 1, 4)
    assert formulas.closed_surface_torsion(x, h) == torsion(x.complex, h).abs_value
    reciprocal = formulas.closed_surface_torsion(x, h, Convention.RECIPROCAL)
    assert reciprocal == torsion(x.complex, h, convention=Convention.RECIPROCAL).abs_value
