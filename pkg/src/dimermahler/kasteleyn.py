"""Kasteleyn matrix and characteristic polynomial of the hexagonal torus dimer model."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Number
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple

import numpy as np

from .laurent import LaurentPoly2, as_exact
from .lattice_graph import BLACK_LETTERS, WHITE_LETTERS, TorusGraph, build_torus_graph

EDGE_LABELS: Tuple[str, ...] = tuple(e.label for e in build_torus_graph(1).edges)
VERTICES: Tuple[str, ...] = tuple(WHITE_LETTERS) + tuple(BLACK_LETTERS)
FAMILIES = (6, 3, 4)


class EdgeWeighting(Mapping):
    """A 3Λ-periodic weight function: one value per fundamental-domain edge."""

    __slots__ = ("_w",)

    def __init__(self, weights: Mapping[str, object]):
        missing = [k for k in EDGE_LABELS if k not in weights]
        extra = [k for k in weights if k not in EDGE_LABELS]
        if missing:
            raise ValueError(f"weighting is missing edges: {', '.join(missing)}")
        if extra:
            raise ValueError(f"unknown edge labels: {', '.join(map(str, extra))}")
        self._w = {k: as_exact(weights[k]) for k in EDGE_LABELS}

    def __getitem__(self, label: str):
        try:
            return self._w[label]
        except KeyError:
            raise KeyError(f"no weight for edge {label!r}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(EDGE_LABELS)

    def __len__(self) -> int:
        return len(EDGE_LABELS)

    def __repr__(self) -> str:
        return "EdgeWeighting({" + ", ".join(f"{k}: {v}" for k, v in self._w.items()) + "})"

    def __eq__(self, other) -> bool:
        if isinstance(other, EdgeWeighting):
            return self._w == other._w
        return NotImplemented

    __hash__ = None

    @property
    def has_negative(self) -> bool:
        """Negative weights are fine for algebra but not for partition functions."""
        return any(_lt_zero(v) for v in self._w.values())

    @property
    def is_exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self._w.values())

    def replace(self, **updates) -> "EdgeWeighting":
        w = dict(self._w)
        w.update(updates)
        return EdgeWeighting(w)

    @classmethod
    def uniform(cls, value=1) -> "EdgeWeighting":
        return cls({k: value for k in EDGE_LABELS})

    def to_json(self) -> dict:
        return {"weights": {k: str(v) if isinstance(v, Fraction) else repr(v) for k, v in self._w.items()}}

    @classmethod
    def from_json(cls, data: Mapping) -> "EdgeWeighting":
        if "weights" not in data:
            raise ValueError('weighting JSON needs a top-level "weights" object')
        parsed = {}
        for k, v in data["weights"].items():
            if isinstance(v, str):
                try:
                    parsed[k] = Fraction(v.strip())
                except ValueError:
                    parsed[k] = float(v)
            else:
                parsed[k] = v
        return cls(parsed)


def _lt_zero(v) -> bool:
    try:
        return v < 0
    except TypeError:
        return False


# ------------------------------------------------------------------ matrix


def kasteleyn_matrix(g: TorusGraph, weights: Mapping[str, object]) -> List[List[LaurentPoly2]]:
    """Rows are white vertices, columns black vertices, entries W(e) x^[x-crossing] y^[y-crossing].

    Zero-weight edges stay in the graph, so the shape does not depend on W.
    """
    size = len(g.white_vertices)
    zero = LaurentPoly2()
    K = [[zero] * size for _ in range(size)]
    wpos = {v: i for i, v in enumerate(g.white_vertices)}
    bpos = {v: i for i, v in enumerate(g.black_vertices)}
    for e in g.edges:
        a, b = int(e.crossing == "x"), int(e.crossing == "y")
        K[wpos[e.white]][bpos[e.black]] = LaurentPoly2.monomial(a, b, _weight(weights, e.base))
    return K


def kasteleyn_matrix_numeric(g: TorusGraph, weights: Mapping[str, object], x: complex, y: complex) -> np.ndarray:
    size = len(g.white_vertices)
    K = np.zeros((size, size), dtype=complex)
    wpos = {v: i for i, v in enumerate(g.white_vertices)}
    bpos = {v: i for i, v in enumerate(g.black_vertices)}
    for e in g.edges:
        factor = x if e.crossing == "x" else y if e.crossing == "y" else 1
        K[wpos[e.white], bpos[e.black]] += complex(_weight(weights, e.base)) * factor
    return K


def _weight(weights: Mapping[str, object], label: str):
    try:
        return weights[label]
    except KeyError:
        raise KeyError(f"weighting has no value for edge {label}") from None


def char_poly(g: TorusGraph, weights: Mapping[str, object]) -> LaurentPoly2:
    """det K as a polynomial in x, y; exact whenever the weights are.

    The fundamental domain uses sparse Laplace expansion.  Lifted graphs
    are too wide for that, so their determinant is evaluated on a grid of
    points and interpolated (degree in x and in y is at most 3n).
    """
    if g.n == 1:
        return _laplace_det(g, weights)
    return _interpolated_det(g, weights)


def _laplace_det(g: TorusGraph, weights: Mapping[str, object]) -> LaurentPoly2:
    # rows expanded in order; state = set of columns already used
    size = len(g.white_vertices)
    wpos = {v: i for i, v in enumerate(g.white_vertices)}
    bpos = {v: i for i, v in enumerate(g.black_vertices)}
    rows: List[List[Tuple[int, object, int, int]]] = [[] for _ in range(size)]
    for e in g.edges:
        w = _weight(weights, e.base)
        if w != 0:
            rows[wpos[e.white]].append((bpos[e.black], w, int(e.crossing == "x"), int(e.crossing == "y")))

    states: Dict[int, Dict[Tuple[int, int], object]] = {0: {(0, 0): 1}}
    for row in rows:
        nxt: Dict[int, Dict[Tuple[int, int], object]] = {}
        for mask, poly in states.items():
            for col, w, da, db in row:
                if mask >> col & 1:
                    continue
                # columns already used to the right of col are inversions
                sign = -1 if bin(mask >> (col + 1)).count("1") & 1 else 1
                target = nxt.setdefault(mask | (1 << col), {})
                for (a, b), c in poly.items():
                    key = (a + da, b + db)
                    target[key] = target.get(key, 0) + sign * c * w
        states = {m: p for m, p in nxt.items() if any(v != 0 for v in p.values())}
        if not states:
            return LaurentPoly2()
    (poly,) = states.values()
    return LaurentPoly2(poly)


def _interpolated_det(g: TorusGraph, weights: Mapping[str, object]) -> LaurentPoly2:
    deg = 3 * g.n
    exact = all(isinstance(weights[e.base], Fraction) for e in g.edges)
    if not exact:
        # roots-of-unity grid + FFT keeps the float path well conditioned
        k = deg + 1
        zs = np.exp(2j * np.pi * np.arange(k) / k)
        vals = np.array([[np.linalg.det(kasteleyn_matrix_numeric(g, weights, x, y)) for y in zs] for x in zs])
        coeffs = np.fft.fft2(vals) / (k * k)
        scale = max(1.0, float(np.abs(coeffs).max()))
        out = {}
        for a in range(k):
            for b in range(k):
                c = coeffs[a, b]
                if abs(c) > 1e-12 * scale:
                    out[(a, b)] = c.real if abs(c.imag) <= 1e-12 * scale else complex(c)
        return LaurentPoly2(out)

    points = [Fraction(i) for i in range(deg + 1)]
    size = len(g.white_vertices)
    wpos = {v: i for i, v in enumerate(g.white_vertices)}
    bpos = {v: i for i, v in enumerate(g.black_vertices)}
    values = {}
    for x in points:
        for y in points:
            M = [[Fraction(0)] * size for _ in range(size)]
            for e in g.edges:
                f = x if e.crossing == "x" else y if e.crossing == "y" else 1
                M[wpos[e.white]][bpos[e.black]] += weights[e.base] * f
            values[(x, y)] = _fraction_det(M)
    # tensor-product Lagrange interpolation: first in y for each x, then in x
    by_x = {x: _interpolate(points, [values[(x, y)] for y in points]) for x in points}
    out = {}
    for b in range(deg + 1):
        col = _interpolate(points, [by_x[x][b] for x in points])
        for a, c in enumerate(col):
            if c:
                out[(a, b)] = c
    return LaurentPoly2(out)


def _fraction_det(M: List[List[Fraction]]) -> Fraction:
    M = [row[:] for row in M]
    n = len(M)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            M[col], M[pivot] = M[pivot], M[col]
            det = -det
        p = M[col][col]
        det *= p
        for r in range(col + 1, n):
            f = M[r][col]
            if f:
                f /= p
                row, prow = M[r], M[col]
                for c in range(col + 1, n):
                    if prow[c]:
                        row[c] -= f * prow[c]
    return det


def _interpolate(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> List[Fraction]:
    """Monomial coefficients of the polynomial through (xs, ys)."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            denom *= xi - xj
        for k, c in enumerate(basis):
            coeffs[k] += yi * c / denom
    return coeffs


def laurent_char_poly(weights: Mapping[str, object]) -> LaurentPoly2:
    """(xy)^-1 det K on the fundamental domain, i.e. F(x, y) = (xy)^-1 P~(x, y, 1)."""
    return char_poly(build_torus_graph(1), weights).shift(-1, -1)


# ----------------------------------------------------------- symbolic form


@dataclass(frozen=True)
class SymTerm:
    sign: int
    labels: Tuple[str, ...]  # one edge per white vertex, in row order a..i
    a: int
    b: int

    def value(self, weights: Mapping[str, object]):
        v = self.sign
        for lab in self.labels:
            v = v * weights[lab]
        return v

    def homogeneous_exponent(self) -> Tuple[int, int, int]:
        return (self.a, self.b, 3 - self.a - self.b)


@dataclass(frozen=True)
class SymCharPoly:
    terms: Tuple[SymTerm, ...]

    def __len__(self) -> int:
        return len(self.terms)

    def specialize(self, weights: Mapping[str, object]) -> LaurentPoly2:
        return LaurentPoly2(((t.a, t.b), t.value(weights)) for t in self.terms)

    def coefficient(self, a: int, b: int) -> List[SymTerm]:
        return [t for t in self.terms if (t.a, t.b) == (a, b)]

    def homogeneous(self) -> Dict[Tuple[int, int, int], List[SymTerm]]:
        out: Dict[Tuple[int, int, int], List[SymTerm]] = {}
        for t in self.terms:
            out.setdefault(t.homogeneous_exponent(), []).append(t)
        return out

    def format(self) -> str:
        lines = []
        for (i, j, k), ts in sorted(self.homogeneous().items(), key=lambda kv: (-kv[0][0], -kv[0][1])):
            mono = "".join(v if e == 1 else f"{v}^{e}" for v, e in (("X", i), ("Y", j), ("Z", k)) if e)
            body = " ".join(("+ " if t.sign > 0 else "- ") + "*".join(t.labels) for t in ts)
            lines.append(f"{mono}: {body}")
        return "\n".join(lines)


@lru_cache(maxsize=1)
def symbolic_char_poly() -> SymCharPoly:
    """Expand the 9x9 determinant in the 27 edge symbols by cofactors along rows."""
    g = build_torus_graph(1)
    entries: List[Dict[int, Tuple[str, int, int]]] = [dict() for _ in range(9)]
    wpos = {v: i for i, v in enumerate(g.white_vertices)}
    bpos = {v: i for i, v in enumerate(g.black_vertices)}
    for e in g.edges:
        entries[wpos[e.white]][bpos[e.black]] = (e.label, int(e.crossing == "x"), int(e.crossing == "y"))

    terms: List[SymTerm] = []

    def expand(row: int, columns: Tuple[int, ...], sign: int, labels: Tuple[str, ...], a: int, b: int):
        if row == 9:
            terms.append(SymTerm(sign, labels, a, b))
            return
        for pos, col in enumerate(columns):
            if col not in entries[row]:
                continue
            lab, da, db = entries[row][col]
            rest = columns[:pos] + columns[pos + 1:]
            expand(row + 1, rest, sign * (-1) ** pos, labels + (lab,), a + da, b + db)

    expand(0, tuple(range(9)), 1, (), 0, 0)
    return SymCharPoly(tuple(terms))


# ------------------------------------------------------- example weightings

_EXAMPLES = {
    6: {
        0: ("Hg", "Dd", "Eh"),
        "m": ("Hb", "Ee", "Df"),
        1: ("Ii", "Ic", "Gi", "Aa", "Ac", "Ga"),
    },
    3: {
        0: ("Hg", "Dd", "Eh", "Be", "Cb", "Ff"),
        "m": ("Hb", "Ee", "Df"),
        1: ("Ii", "Ic", "Gi", "Aa", "Ac", "Ga"),
    },
    4: {
        0: ("Aa", "Bb", "Cf", "Gi", "Fe"),
        1: ("Cb", "Ff", "Be"),
        "m": ("Cc", "Fi", "Ba"),
    },
}

# monomials X^i Y^j Z^k of the three cubic families, and the monomials
# each example weighting is expected to produce
FAMILY_MONOMIALS = {
    6: ((2, 1, 0), (1, 2, 0), (2, 0, 1), (1, 0, 2), (0, 2, 1), (0, 1, 2)),
    3: ((2, 1, 0), (0, 2, 1), (1, 0, 2)),
    4: ((2, 1, 0), (1, 2, 0), (1, 0, 2), (0, 1, 2)),
}
EXAMPLE_MONOMIALS = {
    6: FAMILY_MONOMIALS[6],
    3: ((2, 0, 1), (1, 2, 0), (0, 1, 2)),
    4: FAMILY_MONOMIALS[4],
}


def _check_family(family: int) -> None:
    if family not in FAMILIES:
        raise ValueError(f"family must be one of 6, 3, 4; got {family!r}")


def example_s(family: int, m) -> Number:
    _check_family(family)
    m = as_exact(m)
    if m == 0:
        raise ValueError("m = 0 leaves s undefined")
    numerator = {6: 4 + 3 * m + 3 * m**2 + m**3, 3: 2 + m**3, 4: 2 + m**2 + m**3}[family]
    return numerator / m


def example_weighting(family: int, m, w) -> Tuple[EdgeWeighting, Number]:
    """One of the three explicit weightings in {0, 1, m, w}; returns (weights, s)."""
    _check_family(family)
    m, w = as_exact(m), as_exact(w)
    if w == 0:
        raise ValueError("w must be nonzero")
    s = example_s(family, m)
    values = {label: w for label in EDGE_LABELS}
    for key, labels in _EXAMPLES[family].items():
        for label in labels:
            values[label] = m if key == "m" else key
    return EdgeWeighting(values), s


def example_expected(family: int, m, w) -> Dict[Tuple[int, int, int], Number]:
    """The characteristic polynomial expected from an example weighting."""
    m, w = as_exact(m), as_exact(w)
    s = example_s(family, m)
    scale = m * w**6
    out = {mono: scale for mono in EXAMPLE_MONOMIALS[family]}
    out[(1, 1, 1)] = -s * scale
    return out


def family_cubic(family: int, s, *, shape: str = "family") -> Dict[Tuple[int, int, int], Number]:
    """Homogeneous cubic with parameter s; ``shape="example"`` uses the monomials of the worked example."""
    _check_family(family)
    monos = FAMILY_MONOMIALS[family] if shape == "family" else EXAMPLE_MONOMIALS[family]
    out = {mono: as_exact(1) for mono in monos}
    out[(1, 1, 1)] = -as_exact(s)
    return out


def family_polynomial(family: int, s, *, shape: str = "family") -> LaurentPoly2:
    """F(x, y) = (xy)^-1 F~(x, y, 1) for one of the cubic families."""
    return LaurentPoly2.from_homogeneous(family_cubic(family, s, shape=shape)).shift(-1, -1)


# ---------------------------------------------------------------- symmetries


def gauge_transform(weights: EdgeWeighting, vertex: str, k) -> EdgeWeighting:
    """Multiply the three edges at ``vertex`` by k; det K picks up a factor k."""
    if vertex not in VERTICES:
        raise ValueError(f"unknown vertex {vertex!r}")
    k = as_exact(k)
    if k == 0:
        raise ValueError("gauge factor must be nonzero")
    out = dict(weights)
    for label in EDGE_LABELS:
        if vertex in label:
            out[label] = out[label] * k
    return EdgeWeighting(out)


def scale_all(weights: EdgeWeighting, c) -> EdgeWeighting:
    c = as_exact(c)
    if not c > 0:
        raise ValueError("scale factor must be positive")
    return EdgeWeighting({k: v * c for k, v in weights.items()})


def matching_sign(g: TorusGraph, edge_indices: Sequence[int]) -> int:
    """Sign of the permutation white -> black picked out by a perfect matching."""
    wpos = {v: i for i, v in enumerate(g.white_vertices)}
    bpos = {v: i for i, v in enumerate(g.black_vertices)}
    perm = [0] * len(wpos)
    for i in edge_indices:
        e = g.edges[i]
        perm[wpos[e.white]] = bpos[e.black]
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
