"""Logarithmic Mahler measure of a two-variable Laurent polynomial.

Two independent routes:

* ``mahler_quadrature`` averages log|P| over a tensor grid on the unit
  torus (periodic trapezoid rule, spectrally accurate when the zero set of
  P misses the torus);
* ``mahler_jensen`` integrates out y exactly with Jensen's formula and only
  averages over x.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import List, Optional

import mpmath
import numpy as np

from .laurent import LaurentPoly2

TINY = 1e-300
ROOT_RESIDUAL = 1e-10
CELL_POINTS = 16
ZERO_REL = 1e-12  # |P| below this times ||P||_1 counts as a zero of P


class UndefinedMeasure(ValueError):
    """The Mahler measure of the zero polynomial is not defined."""


@dataclass
class MahlerEstimate:
    value: float
    error: float  # |value - value at half resolution|
    perturbed_nodes: int = 0  # nodes on the zero set, replaced by cell averages
    flagged_nodes: List[float] = field(default_factory=list)

    def __float__(self) -> float:
        return float(self.value)


def _to_mp(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpmathify(c)


def _check(P: LaurentPoly2) -> None:
    if P.is_zero():
        raise UndefinedMeasure("Mahler measure of the zero polynomial is undefined")


def _cell_average(f, tx, ty, h, k: int = CELL_POINTS):
    """Mean of log|f| over the midpoints of a k x k subgrid of the cell around (tx, ty)."""
    # the y offsets are staggered so the subgrid misses diagonal zero sets too
    xs = [((m + 0.5) / k - 0.5) * h for m in range(k)]
    ys = [((m + 0.618034) / k - 0.5) * h for m in range(k)]
    return sum(f(tx + dx, ty + dy) for dx in xs for dy in ys) / (k * k)


def _torus_average(P: LaurentPoly2, n: int, dps: Optional[int]):
    """Mean of log|P| over the n x n grid of roots of unity; (mean, replaced node count).

    A node where P vanishes carries an integrable log singularity; its value
    is replaced by the average over a subgrid of its cell that avoids the node.
    """
    h = 2 * math.pi / n
    if dps is None:
        theta = h * np.arange(n)
        z = np.exp(1j * theta)
        logs = np.abs(P.evaluate_grid(z[:, None], z[None, :]))
        bad = np.argwhere(logs < max(TINY, ZERO_REL * P.norm1()))
        with np.errstate(divide="ignore"):
            logs = np.log(logs)

        def f(tx, ty):
            v = abs(P(complex(math.cos(tx), math.sin(tx)), complex(math.cos(ty), math.sin(ty))))
            return math.log(max(v, TINY))

        for i, j in bad:
            logs[i, j] = _cell_average(f, theta[i], theta[j], h)
        return math.fsum(logs.ravel()) / (n * n), len(bad)
    with mpmath.workdps(dps):
        terms = [(a, b, _to_mp(c)) for (a, b), c in P]
        hm = 2 * mpmath.pi / n
        roots = [mpmath.expj(hm * k) for k in range(n)]
        tiny = mpmath.mpf(10) ** (-dps)
        zero = max(tiny, mpmath.mpf(10) ** (-(dps * 3) // 4) * P.norm1())

        def fm(tx, ty):
            x, y = mpmath.expj(tx), mpmath.expj(ty)
            return mpmath.log(max(abs(mpmath.fsum(c * x**a * y**b for a, b, c in terms)), tiny))

        total = mpmath.mpf(0)
        replaced = 0
        for i, x in enumerate(roots):
            for j, y in enumerate(roots):
                v = abs(mpmath.fsum(c * x**a * y**b for a, b, c in terms))
                if v < zero:
                    replaced += 1
                    total += _cell_average(fm, hm * i, hm * j, hm)
                else:
                    total += mpmath.log(v)
        return total / (n * n), replaced


def mahler_quadrature(P: LaurentPoly2, resolution: int = 128, *, dps: Optional[int] = None) -> MahlerEstimate:
    """Periodic trapezoid rule on resolution**2 torus nodes.

    ``dps`` switches to mpmath at that many decimal digits; the default is
    double precision.
    """
    _check(P)
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    value, perturbed = _torus_average(P, resolution, dps)
    half, p2 = _torus_average(P, resolution // 2, dps)
    return MahlerEstimate(value, abs(value - half), perturbed + p2)


def _jensen_slice(coeffs: np.ndarray, scale: float):
    """log|lead| + sum log max(1, |root|) for a polynomial given high-to-low."""
    nz = np.flatnonzero(np.abs(coeffs) > 1e-14 * scale)
    if nz.size == 0:
        return -math.inf, True
    coeffs = coeffs[nz[0]:]
    lead = coeffs[0]
    if coeffs.size == 1:
        return math.log(abs(lead)), True
    roots = np.roots(coeffs)
    ok = True
    polished = []
    poly = np.poly1d(coeffs)
    deriv = poly.deriv()
    for r in roots:
        for _ in range(3):
            d = deriv(r)
            if d == 0:
                break
            r = r - poly(r) / d
        polished.append(r)
        bound = scale * max(1.0, abs(r)) ** (coeffs.size - 1)
        if abs(poly(r)) > ROOT_RESIDUAL * bound:
            ok = False
    total = math.log(abs(lead)) + sum(math.log(abs(r)) for r in polished if abs(r) > 1)
    return total, ok


def mahler_jensen(P: LaurentPoly2, n_theta: int = 256) -> MahlerEstimate:
    """Average over x = e^{iθ} of Jensen's formula applied to y -> P(x, y)."""
    _check(P)
    by_y = P.coefficients_in_y()
    b_lo, b_hi = P.y_range()
    scale = P.norm1()

    def slice_value(theta: float):
        x = complex(math.cos(theta), math.sin(theta))
        coeffs = np.array([complex(by_y[b](x, 1)) if b in by_y else 0j for b in range(b_hi, b_lo - 1, -1)])
        return _jensen_slice(coeffs, scale)

    def average(n: int):
        vals = []
        flagged = []
        for k in range(n):
            theta = 2 * math.pi * k / n
            v, ok = slice_value(theta)
            if not ok or not math.isfinite(v):
                # refine: replace the node by the mean of two nearby nodes
                h = 1e-6 * 2 * math.pi / n
                v1, ok1 = slice_value(theta - h)
                v2, ok2 = slice_value(theta + h)
                flagged.append(theta)
                v = 0.5 * (v1 + v2)
            vals.append(v)
        return math.fsum(vals) / n, flagged

    value, flagged = average(n_theta)
    half, _ = average(n_theta // 2)
    return MahlerEstimate(value, abs(value - half), 0, flagged)
