# services/surf.py
"""Cell structures for circles, cylinders, pants and the surfaces Σ_{g,n} glued from them."""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from torsionkit.errors import SurfaceError
from torsionkit.services.complex import BasedChainComplex, euler_characteristic
from torsionkit.services.mv import CellMap, Decomposition
from torsionkit.services.ratlin import RatMatrix

logger = logging.getLogger(__name__)

Letter = tuple[int, int]  # (edge index, ±1)


@dataclass(frozen=True)
class BoundaryCircle:
    name: str
    vertex: int
    loop: int


@dataclass(frozen=True)
class SurfaceComplex:
    """A 2-complex given by its 1-skeleton and the attaching words of its faces."""
    vertex_labels: tuple[str, ...]
    edge_labels: tuple[str, ...]
    edge_ends: tuple[tuple[int, int], ...]
    face_labels: tuple[str, ...]
    attaching_words: tuple[tuple[Letter, ...], ...]
    boundary_circles: tuple[BoundaryCircle, ...]
    genus: int = 0

    def __post_init__(self):
        if len(self.edge_ends) != len(self.edge_labels):
            raise SurfaceError("Every edge needs its endpoints.")
        if len(self.attaching_words) != len(self.face_labels):
            raise SurfaceError("Every face needs an attaching word.")
        for tail, head in self.edge_ends:
            if not (0 <= tail < len(self.vertex_labels) and 0 <= head < len(self.vertex_labels)):
                raise SurfaceError(f"Edge endpoint outside the vertex range: {(tail, head)}.")
        for f, word in enumerate(self.attaching_words):
            self._check_closed(f, word)
        names = [c.name for c in self.boundary_circles]
        if len(set(names)) != len(names):
            raise SurfaceError(f"Duplicate boundary circle names in {names}.")
        for c in self.boundary_circles:
            if self.edge_ends[c.loop] != (c.vertex, c.vertex):
                raise SurfaceError(f"Boundary circle {c.name} is not a loop at its vertex.")

    def _check_closed(self, f: int, word: Sequence[Letter]) -> None:
        if not word:
            raise SurfaceError(f"Face {self.face_labels[f]} has an empty attaching word.")
        start = current = self._leave(word[0])
        for edge, sign in word:
            if self._leave((edge, sign)) != current:
                raise SurfaceError(f"Attaching word of {self.face_labels[f]} is not an edge path.")
            tail, head = self.edge_ends[edge]
            current = head if sign > 0 else tail
        if current != start:
            raise SurfaceError(f"Attaching word of {self.face_labels[f]} is not closed.")

    def _leave(self, letter: Letter) -> int:
        tail, head = self.edge_ends[letter[0]]
        return tail if letter[1] > 0 else head

    @cached_property
    def complex(self) -> BasedChainComplex:
        v, e, f = len(self.vertex_labels), len(self.edge_labels), len(self.face_labels)
        d1 = [[0] * e for _ in range(v)]
        for j, (tail, head) in enumerate(self.edge_ends):
            if tail != head:
                d1[tail][j] -= 1
                d1[head][j] += 1
        boundaries = [RatMatrix.from_rows(d1, e)]
        dims = [v, e]
        labels = [self.vertex_labels, self.edge_labels]
        if f:
            d2 = [[0] * f for _ in range(e)]
            for k, word in enumerate(self.attaching_words):
                for edge, sign in word:
                    d2[edge][k] += sign
            boundaries.append(RatMatrix.from_rows(d2, f))
            dims.append(f)
            labels.append(self.face_labels)
        return BasedChainComplex(tuple(dims), tuple(boundaries), tuple(labels))

    @property
    def boundary_count(self) -> int:
        return len(self.boundary_circles)

    @property
    def is_closed(self) -> bool:
        return not self.boundary_circles and bool(self.face_labels)

    @property
    def euler_characteristic(self) -> int:
        return euler_characteristic(self.complex)

    @property
    def circle_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.boundary_circles)

    def circle(self, name: str) -> BoundaryCircle:
        for c in self.boundary_circles:
            if c.name == name:
                return c
        raise SurfaceError(f"No boundary circle named {name!r}; available: {list(self.circle_names)}.")

    def loop_sign(self, edge: int) -> int:
        """Signed number of occurrences of ``edge`` in the attaching words (+1 when there are no faces)."""
        if not self.face_labels:
            return 1
        return sum(sign for word in self.attaching_words for e, sign in word if e == edge)

    def word_strings(self) -> list[str]:
        return [
            " ".join(self.edge_labels[e] + ("" if s > 0 else "^-1") for e, s in word)
            for word in self.attaching_words
        ]


# --- Elementary pieces ---

def circle(name: str = "S", prefix: str = "") -> SurfaceComplex:
    return SurfaceComplex(
        vertex_labels=(f"{prefix}v",),
        edge_labels=(f"{prefix}c",),
        edge_ends=((0, 0),),
        face_labels=(),
        attaching_words=(),
        boundary_circles=(BoundaryCircle(name, 0, 0),),
    )


def cylinder(circles: tuple[str, str] = ("bottom", "top"), prefix: str = "") -> SurfaceComplex:
    """S¹×[-ε, ε]: loops b (bottom) and t (top), vertical edge e, one square with ∂ = t − b."""
    bottom, top = circles
    return SurfaceComplex(
        vertex_labels=(f"{prefix}v_bot", f"{prefix}v_top"),
        edge_labels=(f"{prefix}b", f"{prefix}t", f"{prefix}e"),
        edge_ends=((0, 0), (1, 1), (0, 1)),
        face_labels=(f"{prefix}Q",),
        # t · e⁻¹ · b⁻¹ · e
        attaching_words=(((1, 1), (2, -1), (0, -1), (2, 1)),),
        boundary_circles=(BoundaryCircle(bottom, 0, 0), BoundaryCircle(top, 1, 1)),
    )


def pants(circles: tuple[str, str, str] = ("c1", "c2", "c3"), prefix: str = "") -> SurfaceComplex:
    """Σ_{0,3} with word c1·a1·c2⁻¹·a1⁻¹·a2·c3⁻¹·a2⁻¹, so ∂_2 = c1 − c2 − c3.

    a1 runs v1 -> v2 and a2 runs v1 -> v3, which makes the word a closed edge path.
    """
    return SurfaceComplex(
        vertex_labels=(f"{prefix}v1", f"{prefix}v2", f"{prefix}v3"),
        edge_labels=(f"{prefix}c1", f"{prefix}c2", f"{prefix}c3", f"{prefix}a1", f"{prefix}a2"),
        edge_ends=((0, 0), (1, 1), (2, 2), (0, 1), (0, 2)),
        face_labels=(f"{prefix}F",),
        attaching_words=(((0, 1), (3, 1), (1, -1), (3, -1), (4, 1), (2, -1), (4, -1)),),
        boundary_circles=tuple(BoundaryCircle(name, k, k) for k, name in enumerate(circles)),
    )


# --- Gluing ---

def _fresh(label: str, taken: set[str]) -> str:
    while label in taken:
        label += "'"
    taken.add(label)
    return label


def _genus(euler: int, boundary: int) -> int:
    return max((2 - euler - boundary) // 2, 0)


def glue_along(a: SurfaceComplex, b: SurfaceComplex, pairs: Sequence[tuple[str, str]]) -> tuple[SurfaceComplex, Decomposition]:
    """Identifies each named circle of ``b`` with the paired circle of ``a``.

    The loop of b is sent to σ times the loop of a with σ = −(sign in a)(sign in b),
    so every glued loop occurs with opposite signs on the two sides. Cells of a keep
    their indices in the result; the remaining cells of b follow.
    """
    if not pairs:
        raise SurfaceError("Gluing needs at least one pair of circles.")
    if len({p[0] for p in pairs}) != len(pairs) or len({p[1] for p in pairs}) != len(pairs):
        raise SurfaceError("A circle can be glued at most once.")
    circles_a = [a.circle(ca) for ca, _ in pairs]
    circles_b = [b.circle(cb) for _, cb in pairs]

    vertex_map: dict[int, int] = {}
    edge_map: dict[int, tuple[int, int]] = {}
    for ca, cb in zip(circles_a, circles_b):
        if vertex_map.get(cb.vertex, ca.vertex) != ca.vertex:
            raise SurfaceError(f"Circle {cb.name} shares its vertex with another circle glued elsewhere.")
        vertex_map[cb.vertex] = ca.vertex
        edge_map[cb.loop] = (ca.loop, -a.loop_sign(ca.loop) * b.loop_sign(cb.loop))

    vertex_labels = list(a.vertex_labels)
    taken = set(vertex_labels)
    for k, label in enumerate(b.vertex_labels):
        if k not in vertex_map:
            vertex_map[k] = len(vertex_labels)
            vertex_labels.append(_fresh(label, taken))
    edge_labels, edge_ends = list(a.edge_labels), list(a.edge_ends)
    taken = set(edge_labels)
    for k, label in enumerate(b.edge_labels):
        if k not in edge_map:
            edge_map[k] = (len(edge_labels), 1)
            edge_labels.append(_fresh(label, taken))
            tail, head = b.edge_ends[k]
            edge_ends.append((vertex_map[tail], vertex_map[head]))
    face_labels = list(a.face_labels)
    taken = set(face_labels)
    face_labels += [_fresh(label, taken) for label in b.face_labels]
    words = list(a.attaching_words)
    for word in b.attaching_words:
        words.append(tuple((edge_map[e][0], s * edge_map[e][1]) for e, s in word))

    glued_a = {ca.name for ca in circles_a}
    glued_b = {cb.name for cb in circles_b}
    circles = [c for c in a.boundary_circles if c.name not in glued_a]
    taken = {c.name for c in circles}
    for c in b.boundary_circles:
        if c.name not in glued_b:
            circles.append(BoundaryCircle(_fresh(c.name, taken), vertex_map[c.vertex], edge_map[c.loop][0]))

    x = SurfaceComplex(tuple(vertex_labels), tuple(edge_labels), tuple(edge_ends), tuple(face_labels),
                       tuple(words), tuple(circles))
    x = SurfaceComplex(x.vertex_labels, x.edge_labels, x.edge_ends, x.face_labels, x.attaching_words,
                       x.boundary_circles, _genus(x.euler_characteristic, x.boundary_count))

    k = len(pairs)
    intersection = BasedChainComplex(
        (k, k),
        (RatMatrix.zeros(k, k),),
        (tuple(a.vertex_labels[c.vertex] for c in circles_a), tuple(a.edge_labels[c.loop] for c in circles_a)),
    )
    i_to_a: CellMap = (tuple((c.vertex, 1) for c in circles_a), tuple((c.loop, 1) for c in circles_a))
    i_to_b: CellMap = (tuple((c.vertex, 1) for c in circles_b), tuple((c.loop, edge_map[c.loop][1]) for c in circles_b))
    a_to_x: CellMap = tuple(tuple((j, 1) for j in range(d)) for d in a.complex.dims)
    b_to_x: CellMap = (
        tuple((vertex_map[j], 1) for j in range(len(b.vertex_labels))),
        tuple(edge_map[j] for j in range(len(b.edge_labels))),
    ) + ((tuple((len(a.face_labels) + j, 1) for j in range(len(b.face_labels))),) if b.face_labels else ())
    decomposition = Decomposition(
        x=x.complex, a=a.complex, b=b.complex, i=intersection,
        i_to_a=i_to_a, i_to_b=i_to_b, a_to_x=a_to_x, b_to_x=b_to_x,
    )
    decomposition.validate()
    logger.debug(f"Glued along {[p for p in pairs]}: chi={x.euler_characteristic}, boundary={x.boundary_count}")
    return x, decomposition


def glue(x: SurfaceComplex, cx: str, y: SurfaceComplex, cy: str) -> SurfaceComplex:
    """Glues circle ``cy`` of ``y`` to circle ``cx`` of ``x``; a circle cannot be glued to itself."""
    if x is y and cx == cy:
        raise SurfaceError(f"Cannot glue circle {cx} to itself.")
    return glue_along(x, y, [(cx, cy)])[0]


def double(x: SurfaceComplex) -> tuple[SurfaceComplex, Decomposition]:
    """Two copies of ``x`` glued by the identity along every boundary circle."""
    if not x.boundary_circles:
        raise SurfaceError("Cannot double a surface without boundary.")
    return glue_along(x, x, [(name, name) for name in x.circle_names])


def _torus_parts(index: int, boundary: str) -> tuple[SurfaceComplex, SurfaceComplex, tuple[str, str]]:
    minus, plus = f"S'{index}-", f"S'{index}+"
    return pants((minus, plus, boundary), prefix=f"P{index}."), cylinder((minus, plus), prefix=f"Y{index}."), (minus, plus)


def torus_with_boundary(index: int = 1, boundary: str | None = None) -> tuple[SurfaceComplex, Decomposition]:
    """Σ_{1,1} = pants ∪ cylinder glued along the cylinder's two ends."""
    piece, tube, (minus, plus) = _torus_parts(index, boundary or f"S{index}")
    return glue_along(piece, tube, [(minus, minus), (plus, plus)])


# --- Decompositions of Σ_{g,n} ---

@dataclass(frozen=True)
class Piece:
    index: int
    kind: str  # "torus" or "pants"
    circles: tuple[str, ...]

    @property
    def label(self) -> str:
        return f"{self.kind}{self.index}"


@dataclass(frozen=True)
class PantsDecomposition:
    genus: int
    boundary: int
    pieces: tuple[Piece, ...]
    cutting_circles: tuple[str, ...]
    torus_circles: tuple[str, ...]
    boundary_circles: tuple[str, ...]

    @property
    def piece_count(self) -> int:
        return len(self.pieces)

    def adjacency(self) -> dict[str, tuple[int, ...]]:
        """Circle name -> indices of the pieces it bounds, one entry per side."""
        out: dict[str, list[int]] = {}
        for piece in self.pieces:
            for name in piece.circles:
                out.setdefault(name, []).append(piece.index)
        return {name: tuple(v) for name, v in out.items()}


def _check_parameters(g: int, n: int) -> None:
    if g < 0 or n < 0:
        raise SurfaceError(f"Genus and boundary count must be non-negative, got ({g}, {n}).")
    if 2 * g - 2 + n < 1:
        raise SurfaceError(f"Σ_({g},{n}) has no pants decomposition (need 2g - 2 + n ≥ 1).")


def _free_circles(g: int, n: int) -> list[str]:
    return [f"S{k}" for k in range(1, g + 1)] + [f"S{-k}" for k in range(n)]


def _chain_circles(g: int, n: int) -> list[tuple[str, str, str]]:
    """Boundary triples of the chain of pants forming Σ_{0,g+n}, pieces ν = g+1, ..., 2g-2+n."""
    free = _free_circles(g, n)
    m = len(free)
    if m < 3:
        return []
    if m == 3:
        return [tuple(free)]
    inner = [f"S{g + k}" for k in range(1, m - 2)]
    triples = [(free[0], free[1], inner[0])]
    for k in range(2, m - 2):
        triples.append((inner[k - 1], free[k], inner[k - 2]))
    triples.append((inner[-1], free[m - 2], free[m - 1]))
    return triples


def pants_decomposition(g: int, n: int) -> PantsDecomposition:
    _check_parameters(g, n)
    pieces = []
    if g + n == 2:
        # Σ_{2,0}: two tori sharing S1; Σ_{1,1}: one torus bounded by S0
        shared = "S1" if g == 2 else "S0"
        pieces = [Piece(nu, "torus", (shared,)) for nu in range(1, g + 1)]
    else:
        pieces = [Piece(nu, "torus", (f"S{nu}",)) for nu in range(1, g + 1)]
        pieces += [Piece(g + k, "pants", triple) for k, triple in enumerate(_chain_circles(g, n), start=1)]
    return PantsDecomposition(
        genus=g,
        boundary=n,
        pieces=tuple(pieces),
        cutting_circles=tuple(f"S{k}" for k in range(1, 2 * g - 2 + n)),
        torus_circles=tuple(f"S'{k}" for k in range(1, g + 1)),
        boundary_circles=tuple(f"S{-k}" for k in range(n)),
    )


@dataclass(frozen=True)
class AssemblyStep:
    case: str  # "case1" pants onto Σ_{0,m}; "case2" cylinder onto pants; "case3"/"case4" torus onto the rest
    circles: tuple[str, ...]
    a: SurfaceComplex
    b: SurfaceComplex
    x: SurfaceComplex
    decomposition: Decomposition


@dataclass(frozen=True)
class Assembly:
    surface: SurfaceComplex
    pants: PantsDecomposition
    steps: tuple[AssemblyStep, ...]
    pieces: tuple[SurfaceComplex, ...]  # the pants ν = 1, ..., 2g-2+n

    def steps_of(self, case: str) -> list[AssemblyStep]:
        return [s for s in self.steps if s.case == case]


def assemble(g: int, n: int) -> Assembly:
    """Builds Σ_{g,n}: a chain of pants for Σ_{0,g+n}, then one Σ_{1,1} per handle.

    Each torus is a pants glued to a cylinder (case 2); chain pants are peeled
    one at a time (case 1); handles are attached to the rest along S1, ..., Sg
    (case 4, or case 3 for the last handle of a closed surface).
    """
    decomposition = pants_decomposition(g, n)
    steps: list[AssemblyStep] = []
    pieces: dict[int, SurfaceComplex] = {}

    tori = []
    for piece in decomposition.pieces:
        if piece.kind != "torus":
            continue
        inner, tube, (minus, plus) = _torus_parts(piece.index, piece.circles[0])
        torus, dec = glue_along(inner, tube, [(minus, minus), (plus, plus)])
        steps.append(AssemblyStep("case2", (minus, plus), inner, tube, torus, dec))
        pieces[piece.index] = inner
        tori.append(torus)

    current: SurfaceComplex | None = None
    for piece in decomposition.pieces:
        if piece.kind != "pants":
            continue
        p = pants(piece.circles, prefix=f"P{piece.index}.")
        pieces[piece.index] = p
        if current is None:
            current = p
            continue
        shared = next(c for c in piece.circles if c in current.circle_names)
        x, dec = glue_along(current, p, [(shared, shared)])
        steps.append(AssemblyStep("case1", (shared,), current, p, x, dec))
        current = x

    for torus in tori:
        if current is None:
            current = torus
            continue
        shared = torus.circle_names[0]
        x, dec = glue_along(current, torus, [(shared, shared)])
        steps.append(AssemblyStep("case3" if x.is_closed else "case4", (shared,), current, torus, x, dec))
        current = x

    logger.info(f"Assembled Σ_({g},{n}) from {decomposition.piece_count} pieces in {len(steps)} gluing steps")
    return Assembly(current, decomposition, tuple(steps), tuple(pieces[k] for k in sorted(pieces)))


def surface(g: int, n: int) -> tuple[SurfaceComplex, PantsDecomposition]:
    assembly = assemble(g, n)
    return assembly.surface, assembly.pants
