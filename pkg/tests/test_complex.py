# tests/test_complex.py
from fractions import Fraction

import pytest

from torsionkit.errors import ChainComplexError, ShapeError
from torsionkit.services.complex import (
    BasedChainComplex,
    direct_sum,
    euler_characteristic,
    homology,
    is_chain_map,
    is_valid,
    standard_bases,
    validate,
)
from torsionkit.services.ratlin import RatMatrix

F = Fraction


def interval() -> BasedChainComplex:
    return BasedChainComplex((2, 1), (RatMatrix.from_rows([[-1], [1]]),), (("a", "b"), ("e",)))


def test_interval_homology():
    data = homology(interval())
    assert data.betti == (1, 0)
    assert data.representatives[0].vectors == ((F(1), F(0)),)
    assert data.boundaries[0].vectors == ((F(-1), F(1)),)


def test_validate_reports_degree():
    bad = BasedChainComplex((1, 1, 1), (RatMatrix.from_rows([[1]]), RatMatrix.from_rows([[1]])))
    with pytest.raises(ChainComplexError) as info:
        validate(bad)
    assert info.value.degree == 2
    assert not is_valid(bad)


def test_shape_mismatch_rejected():
    with pytest.raises(ShapeError):
        BasedChainComplex((2, 1), (RatMatrix.zeros(1, 1),))
    with pytest.raises(ShapeError):
        BasedChainComplex((2, 1), ())
    with pytest.raises(ShapeError):
        BasedChainComplex((1,), (), (("a", "b"),))


def test_boundary_outside_range_is_zero():
    c = interval()
    assert c.boundary(0).shape == (0, 2)
    assert c.boundary(2).shape == (1, 0)
    assert c.index_of(0, "b") == 1
    with pytest.raises(KeyError):
        c.index_of(1, "missing")


def test_named_surfaces_are_valid(named_surfaces):
    for x in named_surfaces.values():
        validate(x.complex)


@pytest.mark.parametrize(
    "name, betti",
    [("circle", (1, 1)), ("cylinder", (1, 1, 0)), ("pants", (1, 2, 0)), ("doubled_pants", (1, 4, 1)),
     ("torus_with_boundary", (1, 2, 0))],
)
def test_named_betti_numbers(named_surfaces, name, betti):
    assert homology(named_surfaces[name].complex).betti == betti


def test_random_complexes_are_valid(random_complexes):
    for c in random_complexes:
        data = homology(c)
        assert is_valid(c)
        assert sum((-1) ** p * b for p, b in enumerate(data.betti)) == euler_characteristic(c)


def test_class_coordinates():
    c = interval()
    data = homology(c)
    assert data.class_coordinates(0, (F(0), F(1))) == (F(1),)
    with pytest.raises(ChainComplexError):
        data.class_coordinates(1, (F(1),))


def test_direct_sum_blocks():
    c = direct_sum(interval(), interval())
    assert c.dims == (4, 2)
    assert c.labels[0] == ("A:a", "A:b", "B:a", "B:b")
    assert homology(c).betti == (2, 0)


def test_direct_sum_with_empty_complex_returns_other():
    c = interval()
    assert direct_sum(c, BasedChainComplex((0,), ())) is c


def test_graded_bases_edits():
    h = standard_bases(homology(interval()))
    scaled = h.scaled(0, 0, 3)
    assert scaled[0][0] == (F(3), F(0))
    assert len(h) == 2


def test_identity_is_chain_map():
    c = interval()
    maps = [RatMatrix.from_rows([[1, 0], [0, 1]]), RatMatrix.from_rows([[1]])]
    assert is_chain_map(c, c, maps)
    assert not is_chain_map(c, c, [maps[0], RatMatrix.from_rows([[2]])])
