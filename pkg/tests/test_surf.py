# tests/test_surf.py
import pytest

from torsionkit.errors import SurfaceError
from torsionkit.services import surf
from torsionkit.services.complex import homology, validate

GRID = [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1)]


def expected_betti(g: int, n: int) -> tuple[int, ...]:
    return (1, 2 * g, 1) if n == 0 else (1, 2 * g + n - 1, 0)


def test_piece_cell_counts():
    assert surf.circle().complex.dims == (1, 1)
    assert surf.cylinder().complex.dims == (2, 3, 1)
    assert surf.pants().complex.dims == (3, 5, 1)


def test_pants_boundary_map():
    c = surf.pants().complex
    column = c.boundary(2).column(0)
    assert column == (1, -1, -1, 0, 0)


@pytest.mark.parametrize("g, n", GRID)
def test_surface_grid(g, n):
    x, decomposition = surf.surface(g, n)
    validate(x.complex)
    assert homology(x.complex).betti == expected_betti(g, n)
    assert x.euler_characteristic == 2 - 2 * g - n
    assert x.boundary_count == n
    assert x.genus == g
    assert x.is_closed == (n == 0)
    assert decomposition.piece_count == 2 * g - 2 + n


def test_double_pants_is_closed_genus_two(doubled_pants):
    x, dec = doubled_pants
    assert x.is_closed
    assert x.complex.dims == (3, 7, 2)
    assert homology(x.complex).betti == (1, 4, 1)
    dec.validate()


def test_double_rejects_closed_surface(doubled_pants):
    with pytest.raises(SurfaceError):
        surf.double(doubled_pants[0])


def test_glue_two_pants():
    a = surf.pants(("x1", "x2", "s"), prefix="A.")
    b = surf.pants(("s", "y1", "y2"), prefix="B.")
    x, dec = surf.glue_along(a, b, [("s", "s")])
    dec.validate()
    assert x.euler_characteristic == -2
    assert sorted(x.circle_names) == ["x1", "x2", "y1", "y2"]
    assert homology(x.complex).betti == (1, 3, 0)


def test_glue_with_unknown_circle():
    with pytest.raises(SurfaceError):
        surf.glue(surf.pants(), "nope", surf.pants(), "c1")


def test_unknown_circle_lookup():
    with pytest.raises(SurfaceError):
        surf.pants().circle("S9")


def test_torus_with_boundary():
    x, dec = surf.torus_with_boundary()
    dec.validate()
    assert x.circle_names == ("S1",)
    assert homology(x.complex).betti == (1, 2, 0)
    assert x.genus == 1


@pytest.mark.parametrize("g, n", [(0, 0), (0, 1), (0, 2), (1, 0), (-1, 4), (2, -1)])
def test_rejected_parameters(g, n):
    with pytest.raises(SurfaceError):
        surf.pants_decomposition(g, n)
    with pytest.raises(SurfaceError):
        surf.surface(g, n)


def test_decomposition_of_genus_three_with_two_boundaries():
    d = surf.pants_decomposition(3, 2)
    assert d.piece_count == 6
    assert [p.kind for p in d.pieces].count("torus") == 3
    assert d.boundary_circles == ("S0", "S-1")
    assert d.torus_circles == ("S'1", "S'2", "S'3")


def test_every_cutting_circle_bounds_two_pieces():
    d = surf.pants_decomposition(2, 2)
    adjacency = d.adjacency()
    for name in ("S1", "S2"):
        assert len(adjacency[name]) == 2
    for name in d.boundary_circles:
        assert len(adjacency[name]) == 1


def test_special_decompositions():
    closed = surf.pants_decomposition(2, 0)
    assert [p.circles for p in closed.pieces] == [("S1",), ("S1",)]
    assert surf.pants_decomposition(1, 1).pieces[0].circles == ("S0",)


@pytest.mark.parametrize(
    "g, n, cases",
    [
        (2, 0, {"case2": 2, "case3": 1}),
        (2, 1, {"case2": 2, "case4": 2}),
        (0, 5, {"case1": 2}),
        (3, 0, {"case2": 3, "case4": 2, "case3": 1}),
    ],
)
def test_assembly_cases(g, n, cases):
    assembly = surf.assemble(g, n)
    counted = {case: len(assembly.steps_of(case)) for case in ("case1", "case2", "case3", "case4")}
    assert {k: v for k, v in counted.items() if v} == cases
    assert len(assembly.pieces) == 2 * g - 2 + n
    for step in assembly.steps:
        step.decomposition.validate()


def test_self_gluing_of_one_circle_is_rejected():
    p = surf.pants()
    with pytest.raises(SurfaceError):
        surf.glue(p, "c1", p, "c1")


def test_gluing_two_circles_of_the_same_piece_uses_two_copies():
    p = surf.pants()
    x = surf.glue(p, "c1", p, "c2")
    assert x.euler_characteristic == -2
    assert x.boundary_count == 4


PAIRS = [
    (surf.pants(), surf.pants()),
    (surf.pants(), surf.cylinder()),
    (surf.cylinder(), surf.cylinder()),
    (surf.torus_with_boundary()[0], surf.pants()),
    (surf.surface(1, 2)[0], surf.surface(0, 4)[0]),
    (surf.surface(2, 1)[0], surf.torus_with_boundary()[0]),
]


@pytest.mark.parametrize("x, y", PAIRS)
def test_euler_characteristic_adds_under_gluing(x, y):
    glued = surf.glue(x, x.circle_names[0], y, y.circle_names[-1])
    validate(glued.complex)
    assert glued.euler_characteristic == x.euler_characteristic + y.euler_characteristic
    assert glued.boundary_count == x.boundary_count + y.boundary_count - 2
    betti = homology(glued.complex).betti
    assert sum((-1) ** p * b for p, b in enumerate(betti)) == glued.euler_characteristic
