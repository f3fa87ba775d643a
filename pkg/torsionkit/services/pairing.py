# services/pairing.py
"""Intersection pairing, symplectic bases and period data of closed surface complexes.

Intersections are read off a one-vertex, one-face model: collapse a spanning
tree, merge faces across the remaining edges, and compare the cyclic order of
loop ends around the single vertex.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from torsionkit.errors import ChainComplexError, DegenerateFormError, SurfaceError
from torsionkit.services.complex import homology
from torsionkit.services.ratlin import BasisList, RatMatrix, Vector, as_vector, det, kernel_basis
from torsionkit.services.surf import SurfaceComplex

logger = logging.getLogger(__name__)

Letter = tuple[int, int]


@dataclass(frozen=True)
class OneVertexModel:
    """A closed surface with one vertex and one face, plus the homology maps to and from it.

    ``loop_edges[k]`` is the edge of the original complex that survives as loop k.
    ``to_model`` sends 1-cycles of the original to loop coordinates and
    ``from_model`` sends loop coordinates back to 1-cycles.
    """
    loop_edges: tuple[int, ...]
    loop_labels: tuple[str, ...]
    words: tuple[tuple[Letter, ...], ...]
    tree_edges: tuple[int, ...]
    to_model: RatMatrix
    from_model: RatMatrix

    @property
    def loop_count(self) -> int:
        return len(self.loop_edges)

    def word_strings(self) -> list[str]:
        return [" ".join(self.loop_labels[k] + ("" if s > 0 else "^-1") for k, s in w) for w in self.words]


def _spanning_tree(x: SurfaceComplex, order: Sequence[int]) -> list[int]:
    parent = list(range(len(x.vertex_labels)))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = []
    for e in order:
        tail, head = x.edge_ends[e]
        rt, rh = find(tail), find(head)
        if rt != rh:
            parent[rt] = rh
            tree.append(e)
    if len(tree) != len(x.vertex_labels) - 1:
        raise SurfaceError("Surface complex is not connected.")
    return tree


def _tree_paths(x: SurfaceComplex, tree: Sequence[int]) -> list[dict[int, int]]:
    """For every vertex, the signed tree edges on the path from vertex 0."""
    paths: list[dict[int, int] | None] = [None] * len(x.vertex_labels)
    paths[0] = {}
    pending = list(tree)
    while pending:
        rest = []
        for e in pending:
            tail, head = x.edge_ends[e]
            if paths[tail] is not None and paths[head] is None:
                paths[head] = {**paths[tail], e: 1}
            elif paths[head] is not None and paths[tail] is None:
                paths[tail] = {**paths[head], e: -1}
            elif paths[tail] is None:
                rest.append(e)
        pending = rest
    return paths


def _rotate_to(word: Sequence[Letter], index: int) -> list[Letter]:
    return list(word[index:]) + list(word[:index])


def one_vertex_reduction(x: SurfaceComplex, edge_order: Sequence[int] | None = None) -> OneVertexModel:
    """Collapses a spanning tree (chosen greedily in ``edge_order``) and merges all faces into one."""
    if x.boundary_circles or not x.face_labels:
        raise SurfaceError("One-vertex reduction needs a closed surface.")
    order = list(edge_order) if edge_order is not None else list(range(len(x.edge_labels)))
    if sorted(order) != list(range(len(x.edge_labels))):
        raise SurfaceError("edge_order must be a permutation of the edge indices.")
    tree = _spanning_tree(x, order)
    tree_set = set(tree)

    # expressions of every original edge in the surviving edges
    expr: dict[int, dict[int, Fraction]] = {
        e: ({} if e in tree_set else {e: Fraction(1)}) for e in range(len(x.edge_labels))
    }
    faces = [[(e, s) for e, s in word if e not in tree_set] for word in x.attaching_words]
    if any(not f for f in faces):
        raise SurfaceError("A face collapses completely with the spanning tree.")

    while len(faces) > 1:
        merge = None
        for e in order:
            holders = [k for k, f in enumerate(faces) if any(l[0] == e for l in f)]
            if len(holders) == 2:
                merge = (e, holders[0], holders[1])
                break
        if merge is None:
            raise SurfaceError("Faces cannot be merged into one; the surface is not connected.")
        e, k1, k2 = merge
        f1, f2 = faces[k1], faces[k2]
        i = next(j for j, l in enumerate(f1) if l[0] == e)
        j = next(j for j, l in enumerate(f2) if l[0] == e)
        s1, s2 = f1[i][1], f2[j][1]
        if s1 != -s2:
            raise SurfaceError(f"Edge {x.edge_labels[e]} is glued without reversing orientation.")
        u = _rotate_to(f1, i + 1)[:-1]
        v = _rotate_to(f2, j)[1:]
        # ∂(face 1) = Σu + s1·e, so e ≡ −s1·Σu in homology
        relation: dict[int, Fraction] = {}
        for f, t in u:
            relation[f] = relation.get(f, Fraction(0)) - s1 * t
        for k, ex in expr.items():
            c = ex.pop(e, None)
            if c is None:
                continue
            for f, coef in relation.items():
                ex[f] = ex.get(f, Fraction(0)) + c * coef
                if ex[f] == 0:
                    del ex[f]
        faces = [f for k, f in enumerate(faces) if k not in (k1, k2)] + [u + v]

    loops = sorted({e for f in faces for e, _ in f})
    index = {e: k for k, e in enumerate(loops)}
    words = tuple(tuple((index[e], s) for e, s in f) for f in faces)
    n_edges = len(x.edge_labels)
    to_rows = [[Fraction(0)] * n_edges for _ in loops]
    for e, ex in expr.items():
        for f, coef in ex.items():
            to_rows[index[f]][e] = coef
    paths = _tree_paths(x, tree)
    from_columns = []
    for e in loops:
        tail, head = x.edge_ends[e]
        column = [Fraction(0)] * n_edges
        column[e] += 1
        for f, s in paths[tail].items():
            column[f] += s
        for f, s in paths[head].items():
            column[f] -= s
        from_columns.append(tuple(column))
    logger.debug(f"One-vertex model with {len(loops)} loops, tree {[x.edge_labels[e] for e in tree]}")
    return OneVertexModel(
        loop_edges=tuple(loops),
        loop_labels=tuple(x.edge_labels[e] for e in loops),
        words=words,
        tree_edges=tuple(tree),
        to_model=RatMatrix.from_rows(to_rows, n_edges),
        from_model=RatMatrix.from_columns(from_columns, n_edges),
    )


# --- Intersection numbers ---

def _link_order(model: OneVertexModel) -> list[tuple[int, int]]:
    """Half-edges around the vertex; (k, +1) is the outgoing end of loop k, (k, −1) the incoming one."""
    if not model.loop_count:
        return []
    nxt: dict[tuple[int, int], tuple[int, int]] = {}
    for word in model.words:
        for a, b in zip(word, word[1:] + word[:1]):
            arrive = (a[0], -a[1])
            leave = (b[0], b[1])
            nxt[arrive] = leave
    start = (0, 1)
    order = [start]
    for _ in range(2 * model.loop_count):
        h = nxt.get(order[-1])
        if h is None or h == start:
            break
        order.append(h)
    if len(order) != 2 * model.loop_count or nxt.get(order[-1]) != start:
        raise SurfaceError("The link of the vertex is not a single circle.")
    return order


def loop_pairing(model: OneVertexModel) -> RatMatrix:
    """Intersection numbers of the model's loops."""
    order = _link_order(model)
    position = {h: k for k, h in enumerate(order)}
    size = len(order)
    n = model.loop_count
    rows = [[Fraction(0)] * n for _ in range(n)]
    for x in range(n):
        start, end = position[(x, -1)], position[(x, 1)]
        arc = {order[(start + k) % size] for k in range(1, (end - start) % size)}
        for y in range(n):
            if y == x:
                continue
            plus, minus = (y, 1) in arc, (y, -1) in arc
            if plus != minus:
                rows[x][y] = Fraction(1 if plus else -1)
    return RatMatrix.from_rows(rows, n)


def _check_cycles(x: SurfaceComplex, vectors: Sequence[Sequence[Fraction]]) -> None:
    d1 = x.complex.boundary(1)
    for v in vectors:
        if len(v) != len(x.edge_labels):
            raise ChainComplexError(f"A 1-chain needs {len(x.edge_labels)} coordinates, got {len(v)}.", degree=1)
        if any(a != 0 for a in d1.apply(as_vector(v))):
            raise ChainComplexError("Intersection numbers are only defined for 1-cycles.", degree=1)


def intersection_matrix(x: SurfaceComplex, left: Sequence[Sequence[Fraction]], right: Sequence[Sequence[Fraction]],
                        model: OneVertexModel | None = None) -> RatMatrix:
    """[left_i · right_j] for 1-cycles given in cell coordinates."""
    _check_cycles(x, list(left) + list(right))
    model = model or one_vertex_reduction(x)
    omega = loop_pairing(model)
    lm = [model.to_model.apply(as_vector(v)) for v in left]
    rm = [model.to_model.apply(as_vector(v)) for v in right]
    rows = [[sum((a * b for a, b in zip(u, omega.apply(w))), Fraction(0)) for w in rm] for u in lm]
    return RatMatrix.from_rows(rows, len(rm))


def intersection_form(x: SurfaceComplex, basis: Sequence[Sequence[Fraction]],
                      model: OneVertexModel | None = None) -> RatMatrix:
    return intersection_matrix(x, basis, basis, model)


# --- Symplectic bases and period data ---

@dataclass(frozen=True)
class SymplecticBasis:
    """Γ_1..Γ_2g with Γ_i · Γ_{i+g} = 1 and every other pairing 0."""
    cycles: BasisList

    @property
    def genus(self) -> int:
        return len(self.cycles) // 2


def canonical_form(g: int) -> RatMatrix:
    rows = [[Fraction(0)] * (2 * g) for _ in range(2 * g)]
    for i in range(g):
        rows[i][i + g] = Fraction(1)
        rows[i + g][i] = Fraction(-1)
    return RatMatrix.from_rows(rows, 2 * g)


def symplectic_basis(x: SurfaceComplex, basis: Sequence[Sequence[Fraction]] | None = None) -> SymplecticBasis:
    """Symplectic Gram-Schmidt of ``basis`` (default: the homology representatives of H_1)."""
    if basis is None:
        basis = homology(x.complex).representatives[1].vectors
    _check_cycles(x, basis)
    model = one_vertex_reduction(x)
    omega = loop_pairing(model)
    coords = [model.to_model.apply(as_vector(v)) for v in basis]

    def form(u: Vector, w: Vector) -> Fraction:
        return sum((a * b for a, b in zip(u, omega.apply(w))), Fraction(0))

    pool = list(coords)
    us, vs = [], []
    while pool:
        u = pool.pop(0)
        partner = next((k for k, w in enumerate(pool) if form(u, w) != 0), None)
        if partner is None:
            raise DegenerateFormError("Intersection form is degenerate on the given cycles.")
        w = pool.pop(partner)
        v = tuple(a / form(u, w) for a in w)
        pool = [
            tuple(z_k - form(z, v) * u_k + form(z, u) * v_k for z_k, u_k, v_k in zip(z, u, v))
            for z in pool
        ]
        us.append(u)
        vs.append(v)
    cycles = [model.from_model.apply(c) for c in us + vs]
    logger.debug(f"Symplectic basis of genus {len(us)} found")
    return SymplecticBasis(BasisList(len(x.edge_labels), tuple(cycles)))


def period_matrix(x: SurfaceComplex, gamma: SymplecticBasis, h1: Sequence[Sequence[Fraction]]) -> RatMatrix:
    """℘_ij = Γ_i · h_j, the pairing of Γ_i with the Poincaré dual of the j-th basis cycle."""
    return intersection_matrix(x, gamma.cycles.vectors, h1)


def fundamental_class(x: SurfaceComplex) -> Vector:
    """The generator of ker ∂_2 whose first nonzero coefficient is +1."""
    if not x.is_closed:
        raise SurfaceError("Only closed surfaces carry a fundamental class.")
    kernel = kernel_basis(x.complex.boundary(2))
    if len(kernel) != 1:
        raise SurfaceError(f"Expected a one-dimensional H_2, found dimension {len(kernel)}.")
    v = kernel[0]
    lead = next(a for a in v if a != 0)
    return tuple(a / lead for a in v)


def delta_02(x: SurfaceComplex, h0: Sequence[Fraction], h2: Sequence[Fraction]) -> RatMatrix:
    """[λμ] where h0 = λ·[point] and h2 = μ·[Σ]."""
    if homology(x.complex).betti_at(0) != 1:
        raise SurfaceError("Δ_{0,2} needs a connected surface.")
    fundamental = fundamental_class(x)
    lam = sum(as_vector(h0), Fraction(0))
    k = next(i for i, a in enumerate(fundamental) if a != 0)
    mu = Fraction(h2[k]) / fundamental[k]
    if any(Fraction(a) != mu * f for a, f in zip(h2, fundamental)):
        raise ChainComplexError("h2 is not a multiple of the fundamental class.", degree=2)
    return RatMatrix.from_rows([[lam * mu]], 1)


def period_determinants(x: SurfaceComplex, h1: Sequence[Sequence[Fraction]], h0: Sequence[Fraction],
                        h2: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """(det ℘, det Δ_{0,2}) for the given homology bases."""
    gamma = symplectic_basis(x)
    return det(period_matrix(x, gamma, h1)), det(delta_02(x, h0, h2))
