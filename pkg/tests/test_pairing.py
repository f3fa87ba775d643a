# tests/test_pairing.py
from fractions import Fraction

import pytest

from torsionkit.errors import ChainComplexError, SurfaceError
from torsionkit.services import surf
from torsionkit.services.complex import GradedBases, homology
from torsionkit.services.pairing import (
    canonical_form,
    delta_02,
    fundamental_class,
    intersection_form,
    intersection_matrix,
    one_vertex_reduction,
    period_determinants,
    period_matrix,
    symplectic_basis,
)
from torsionkit.services.ratlin import BasisList, det
from torsionkit.services.torsion import torsion

F = Fraction


@pytest.fixture(params=[(2, 0), (3, 0)])
def closed_surface(request):
    return surf.surface(*request.param)[0]


def test_one_vertex_model_has_two_g_loops(closed_surface):
    model = one_vertex_reduction(closed_surface)
    assert model.loop_count == 2 * closed_surface.genus
    assert len(model.words) == 1


def test_form_is_antisymmetric_and_nondegenerate(closed_surface):
    basis = homology(closed_surface.complex).representatives[1].vectors
    form = intersection_form(closed_surface, basis)
    assert form == -form.transpose()
    assert det(form) != 0


def test_symplectic_basis_has_canonical_form(closed_surface):
    gamma = symplectic_basis(closed_surface)
    assert gamma.genus == closed_surface.genus
    assert intersection_form(closed_surface, gamma.cycles.vectors) == canonical_form(gamma.genus)


def test_form_does_not_depend_on_spanning_tree(doubled_pants):
    x, _ = doubled_pants
    basis = homology(x.complex).representatives[1].vectors
    reversed_model = one_vertex_reduction(x, edge_order=list(reversed(range(len(x.edge_labels)))))
    assert intersection_form(x, basis, reversed_model) == intersection_form(x, basis)


def test_fundamental_class(closed_surface):
    z = fundamental_class(closed_surface)
    assert next(a for a in z if a != 0) == 1
    assert closed_surface.complex.boundary(2).apply(z) == (0,) * len(closed_surface.edge_labels)


def test_period_data_of_canonical_bases(doubled_pants):
    x, _ = doubled_pants
    gamma = symplectic_basis(x)
    h0 = homology(x.complex).representatives[0][0]
    assert period_determinants(x, gamma.cycles.vectors, h0, fundamental_class(x)) == (1, 1)
    assert period_matrix(x, gamma, gamma.cycles.vectors) == canonical_form(2)


def test_delta_scales_with_point_and_fundamental_class(doubled_pants):
    x, _ = doubled_pants
    h0 = tuple(2 * a for a in homology(x.complex).representatives[0][0])
    h2 = tuple(3 * a for a in fundamental_class(x))
    assert delta_02(x, h0, h2)[0, 0] == 6


def test_delta_rejects_non_multiple(doubled_pants):
    x, _ = doubled_pants
    h0 = homology(x.complex).representatives[0][0]
    h2 = (F(1), F(0))
    with pytest.raises(ChainComplexError):
        delta_02(x, h0, h2)


def test_torsion_equals_period_ratio(closed_surface):
    data = homology(closed_surface.complex)
    fundamental = fundamental_class(closed_surface)
    h = GradedBases((data.representatives[0], data.representatives[1], BasisList(len(fundamental), (fundamental,))))
    h = h.scaled(1, 0, F(3, 2)).scaled(0, 0, 5)
    det_period, det_delta = period_determinants(closed_surface, h[1].vectors, h[0][0], h[2][0])
    assert torsion(closed_surface.complex, h).abs_value == abs(det_period / det_delta)


def test_surfaces_with_boundary_rejected():
    p = surf.pants()
    with pytest.raises(SurfaceError):
        one_vertex_reduction(p)
    with pytest.raises(SurfaceError):
        fundamental_class(p)


def test_non_cycle_rejected(doubled_pants):
    x, _ = doubled_pants
    edge = tuple(F(int(k == len(x.edge_labels) - 1)) for k in range(len(x.edge_labels)))
    with pytest.raises(ChainComplexError):
        intersection_matrix(x, [edge], [edge])


def test_torus_from_doubled_cylinder():
    torus, _ = surf.double(surf.cylinder())
    assert torus.is_closed
    model = one_vertex_reduction(torus)
    assert model.loop_count == 2
    assert len(model.words) == 1
    gamma = symplectic_basis(torus)
    assert gamma.genus == 1
    assert intersection_form(torus, gamma.cycles.vectors) == canonical_form(1)
    assert period_matrix(torus, gamma, gamma.cycles.vectors) == canonical_form(1)


def test_form_is_bilinear(doubled_pants):
    x, _ = doubled_pants
    basis = list(homology(x.complex).representatives[1].vectors)
    form = intersection_form(x, basis)
    n = len(basis)
    for i in range(n):
        scaled = list(basis)
        scaled[i] = tuple(3 * a for a in basis[i])
        other = intersection_form(x, scaled)
        for j in range(n):
            factor = (3 if j != i else 9)
            assert other.entries[i * n + j] == factor * form.entries[i * n + j]
            assert other.entries[j * n + i] == factor * form.entries[j * n + i]
        untouched = [(r, c) for r in range(n) for c in range(n) if i not in (r, c)]
        assert all(other.entries[r * n + c] == form.entries[r * n + c] for r, c in untouched)
