"""The hexagonal graph on the torus C/3nΛ, its perfect matchings and lozenge tilings.

Vertices of the honeycomb are the triangles of the unit triangular lattice
Λ = Z + Zω.  White vertices (lower case a..i) are the up-pointing triangles,
black vertices (upper case A..I) the down-pointing ones.  Both colours carry
grid coordinates (r, c) with 0 <= r, c < 3n, and white (r, c) is adjacent to

    black (r, c)        same cell
    black (r, c + 1)    crosses the left/right side when c + 1 wraps  -> "y"
    black (r - 1, c)    crosses the top/bottom side when r - 1 wraps  -> "x"

which for n = 1 reproduces the nonzero pattern of the 9x9 Kasteleyn matrix
with rows a..i and columns A..I.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

BLACK_LETTERS = "ABCDEFGHI"
WHITE_LETTERS = "abcdefghi"
OMEGA = complex(-0.5, math.sqrt(3) / 2)

# edge kinds, in the order they are listed per white vertex
SAME, COLUMN_STEP, ROW_STEP = 0, 1, 2
ORIENTATIONS = {SAME: 0, COLUMN_STEP: 120, ROW_STEP: 240}

DEFAULT_MAX_VERTICES = 40

LatticePoint = Tuple[int, int]
Segment = Tuple[LatticePoint, LatticePoint]


class WorkBoundExceeded(RuntimeError):
    """Raised instead of starting an enumeration that is too large."""


@dataclass(frozen=True)
class Edge:
    index: int
    white: str
    black: str
    crossing: Optional[str]  # "x", "y" or None
    kind: int
    white_cell: Tuple[int, int]
    black_cell: Tuple[int, int]
    base: str  # label of the corresponding edge of the n = 1 graph, e.g. "Ga"

    @property
    def label(self) -> str:
        return self.black + self.white


@dataclass(frozen=True)
class TorusGraph:
    n: int
    black_vertices: Tuple[str, ...]
    white_vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]
    positions: Mapping[str, complex] = field(repr=False)

    @property
    def size(self) -> int:
        """Side length 3n of the fundamental parallelogram."""
        return 3 * self.n

    def incident(self, vertex: str) -> List[Edge]:
        return [e for e in self.edges if vertex in (e.white, e.black)]

    def edge_index(self, label: str) -> int:
        for e in self.edges:
            if e.label == label:
                return e.index
        raise KeyError(f"no edge labelled {label!r}")

    def edge(self, label: str) -> Edge:
        return self.edges[self.edge_index(label)]


def _letter(r: int, c: int, letters: str) -> str:
    return letters[3 * (r % 3) + (c % 3)]


def _vertex_label(r: int, c: int, letters: str, n: int) -> str:
    if n == 1:
        return _letter(r, c, letters)
    return f"{_letter(r, c, letters)}{r // 3},{c // 3}"


def lattice_point(i: int, j: int) -> complex:
    return i + j * OMEGA


def build_torus_graph(n: int) -> TorusGraph:
    """Honeycomb graph on C/3nΛ; the n = 1 case is the 18-vertex fundamental domain."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"torus scale n must be a positive integer, got {n!r}")
    size = 3 * n
    cells = [(r, c) for r in range(size) for c in range(size)]
    whites = tuple(_vertex_label(r, c, WHITE_LETTERS, n) for r, c in cells)
    blacks = tuple(_vertex_label(r, c, BLACK_LETTERS, n) for r, c in cells)

    positions: Dict[str, complex] = {}
    for (r, c), w, b in zip(cells, whites, blacks):
        origin = lattice_point(c, r)
        positions[w] = origin + (2 + OMEGA) / 3
        positions[b] = origin + (1 + 2 * OMEGA) / 3

    raw = []
    for r, c in cells:
        w = _vertex_label(r, c, WHITE_LETTERS, n)
        steps = [
            (SAME, (r, c), None),
            (COLUMN_STEP, (r, (c + 1) % size), "y" if c == size - 1 else None),
            (ROW_STEP, ((r - 1) % size, c), "x" if r == 0 else None),
        ]
        for kind, (br, bc), crossing in steps:
            b = _vertex_label(br, bc, BLACK_LETTERS, n)
            base = _letter(br, bc, BLACK_LETTERS) + _letter(r, c, WHITE_LETTERS)
            raw.append((r * size + c, br * size + bc, kind, w, b, crossing, (r, c), (br, bc), base))
    raw.sort(key=lambda t: (t[0], t[1]))
    edges = tuple(
        Edge(i, w, b, crossing, kind, wc, bc, base)
        for i, (_, _, kind, w, b, crossing, wc, bc, base) in enumerate(raw)
    )
    return TorusGraph(n, blacks, whites, edges, positions)


@dataclass(frozen=True)
class Matching:
    edges: frozenset

    def sorted_edges(self) -> Tuple[int, ...]:
        return tuple(sorted(self.edges))

    def labels(self, g: TorusGraph) -> Tuple[str, ...]:
        return tuple(g.edges[i].label for i in self.sorted_edges())


def iter_matchings(
    g: TorusGraph,
    allowed: Optional[Sequence[int]] = None,
    *,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    allow_large: bool = False,
) -> Iterator[Matching]:
    """Yield perfect matchings in lexicographic order of their sorted edge indices.

    ``allowed`` restricts the usable edges (e.g. to positive weight).
    """
    n_vertices = len(g.white_vertices) + len(g.black_vertices)
    if n_vertices > max_vertices and not allow_large:
        raise WorkBoundExceeded(
            f"refusing to enumerate matchings of a {n_vertices}-vertex graph "
            f"(bound {max_vertices}); pass allow_large=True to override"
        )
    usable = set(range(len(g.edges))) if allowed is None else set(allowed)
    white_pos = {w: k for k, w in enumerate(g.white_vertices)}
    options: List[List[Edge]] = [[] for _ in g.white_vertices]
    for e in g.edges:
        if e.index in usable:
            options[white_pos[e.white]].append(e)

    used: set = set()
    chosen: List[int] = []
    total = len(g.white_vertices)

    def extend(k: int) -> Iterator[Matching]:
        if k == total:
            yield Matching(frozenset(chosen))
            return
        for e in options[k]:
            if e.black in used:
                continue
            used.add(e.black)
            chosen.append(e.index)
            yield from extend(k + 1)
            chosen.pop()
            used.discard(e.black)

    yield from extend(0)


def enumerate_matchings(
    g: TorusGraph,
    allowed: Optional[Sequence[int]] = None,
    *,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    allow_large: bool = False,
) -> List[Matching]:
    return list(iter_matchings(g, allowed, max_vertices=max_vertices, allow_large=allow_large))


def positive_edges(g: TorusGraph, weights: Mapping[str, object]) -> List[int]:
    """Indices of edges whose (3Λ-periodic) weight is nonzero."""
    return [e.index for e in g.edges if _weight(weights, e) != 0]


def _weight(weights: Mapping[str, object], e: Edge):
    try:
        return weights[e.base]
    except KeyError:
        raise KeyError(f"weighting has no value for edge {e.base}") from None


def matching_monomial(g: TorusGraph, m: Matching, weights: Mapping[str, object]):
    """Weight product of the matching and its numbers of x- and y-crossings."""
    coefficient = 1
    a = b = 0
    for i in m.sorted_edges():
        e = g.edges[i]
        coefficient = coefficient * _weight(weights, e)
        a += e.crossing == "x"
        b += e.crossing == "y"
    return coefficient, a, b


# ---------------------------------------------------------------- tilings


@dataclass(frozen=True)
class Rhombus:
    white: str
    black: str
    orientation: int
    corners: Tuple[LatticePoint, ...]
    diagonal: Segment  # the triangle edge erased when the two triangles merge


@dataclass(frozen=True)
class RhombusTiling:
    n: int
    rhombi: Tuple[Rhombus, ...]
    forced: Tuple[Segment, ...]


def _rhombus_geometry(e: Edge) -> Tuple[Tuple[LatticePoint, ...], Segment]:
    # lattice coordinates (i, j) of i + jω; white (r, c) is the up triangle at (c, r)
    r, c = e.white_cell
    if e.kind == SAME:
        corners = ((c, r), (c + 1, r), (c + 1, r + 1), (c, r + 1))
        diagonal = ((c, r), (c + 1, r + 1))
    elif e.kind == COLUMN_STEP:
        corners = ((c, r), (c + 1, r), (c + 2, r + 1), (c + 1, r + 1))
        diagonal = ((c + 1, r), (c + 1, r + 1))
    else:
        corners = ((c, r - 1), (c + 1, r), (c + 1, r + 1), (c, r))
        diagonal = ((c, r), (c + 1, r))
    return corners, diagonal


def canonical_segment(seg: Segment, size: int) -> Tuple:
    """Segment up to translation by the period lattice (size * Λ)."""
    (i1, j1), (i2, j2) = seg
    forms = [
        ((i1 % size, j1 % size), (i2 - i1, j2 - j1)),
        ((i2 % size, j2 % size), (i1 - i2, j1 - j2)),
    ]
    return min(forms)


def to_rhombus_tiling(g: TorusGraph, m: Matching, weights: Mapping[str, object]) -> RhombusTiling:
    """Glue the two triangles of every matched edge into a rhombus."""
    whites = set()
    blacks = set()
    rhombi = []
    for i in m.sorted_edges():
        e = g.edges[i]
        if _weight(weights, e) == 0:
            raise ValueError(f"matching uses edge {e.label}, which has weight 0")
        if e.white in whites or e.black in blacks:
            raise ValueError(f"edge {e.label} overlaps another rhombus")
        whites.add(e.white)
        blacks.add(e.black)
        corners, diagonal = _rhombus_geometry(e)
        rhombi.append(Rhombus(e.white, e.black, ORIENTATIONS[e.kind], corners, diagonal))
    if len(whites) != len(g.white_vertices) or len(blacks) != len(g.black_vertices):
        raise ValueError("not a perfect matching: some triangles are left uncovered")
    forced = tuple(_rhombus_geometry(e)[1] for e in g.edges if _weight(weights, e) == 0)
    return RhombusTiling(g.n, tuple(rhombi), forced)


def tiling_respects_forced(t: RhombusTiling) -> bool:
    size = 3 * t.n
    erased = {canonical_segment(r.diagonal, size) for r in t.rhombi}
    return not any(canonical_segment(s, size) in erased for s in t.forced)


FILLS = {0: "#e8c170", 120: "#8fb8de", 240: "#b5d99c"}


def render_tiling_svg(t: RhombusTiling, *, scale: float = 40.0, margin: float = 1.5,
                      fills: Optional[Mapping[int, str]] = None) -> str:
    """SVG 1.1 drawing of a tiling; one <polygon> per rhombus, one <path> per forced edge."""
    fills = dict(FILLS if fills is None else fills)
    size = 3 * t.n

    def xy(p: LatticePoint) -> Tuple[float, float]:
        z = lattice_point(*p)
        return scale * z.real, -scale * z.imag

    pts = [xy(p) for r in t.rhombi for p in r.corners]
    outline = [xy(p) for p in ((0, 0), (size, 0), (size, size), (0, size), (0, 0))]
    xs = [p[0] for p in pts + outline]
    ys = [p[1] for p in pts + outline]
    pad = margin * scale
    x0, y0 = min(xs) - pad, min(ys) - pad
    width, height = max(xs) + pad - x0, max(ys) + pad - y0

    def fmt(v: float) -> str:
        s = f"{v:.3f}"
        return "0.000" if s == "-0.000" else s

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{fmt(x0)} {fmt(y0)} {fmt(width)} {fmt(height)}" '
        f'width="{fmt(width)}" height="{fmt(height)}">',
        '<g stroke="#333333" stroke-width="1" stroke-linejoin="round">',
    ]
    for r in t.rhombi:
        coords = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in map(xy, r.corners))
        lines.append(
            f'<polygon points="{coords}" fill="{fills[r.orientation]}" '
            f'data-edge="{r.black}{r.white}" data-orientation="{r.orientation}"/>'
        )
    lines.append("</g>")
    lines.append(
        '<polyline fill="none" stroke="#999999" stroke-dasharray="4 3" points="'
        + " ".join(f"{fmt(x)},{fmt(y)}" for x, y in outline)
        + '"/>'
    )
    for a, b in t.forced:
        (xa, ya), (xb, yb) = xy(a), xy(b)
        lines.append(
            f'<path d="M {fmt(xa)} {fmt(ya)} L {fmt(xb)} {fmt(yb)}" '
            f'stroke="#c0392b" stroke-width="3" stroke-linecap="round"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
