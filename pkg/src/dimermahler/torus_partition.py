"""Finite-torus dimer formulas: lifted characteristic polynomial, theta-sector
products and the partition function of the n-fold cover.

Products over n^2 factors are accumulated as (sum of logs, phase) so large
n neither overflows nor underflows.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import mpmath
import numpy as np

from .kasteleyn import EdgeWeighting, kasteleyn_matrix_numeric
from .laurent import LaurentPoly2
from .lattice_graph import TorusGraph, iter_matchings, matching_monomial, positive_edges
from .mahler import _to_mp

SECTORS = ((0, 0), (0, 1), (1, 0), (1, 1))
IMAG_TOL = 1e-9


class NonPositivePartition(ValueError):
    pass


@dataclass(frozen=True)
class LogValue:
    """A complex number stored as log|z| and arg z (log_abs = -inf for zero)."""

    log_abs: float
    phase: float

    @property
    def value(self) -> complex:
        if self.log_abs == -math.inf:
            return 0j
        return cmath.rect(math.exp(self.log_abs), self.phase)


def _roots(z: complex, n: int):
    """The n-th roots of z: principal root times successive powers of e^{2πi/n}."""
    r = abs(z) ** (1.0 / n)
    base = cmath.phase(z) / n
    return [cmath.rect(r, base + 2 * math.pi * k / n) for k in range(n)]


def pn_log(P: LaurentPoly2, n: int, x: complex, y: complex) -> LogValue:
    """log-space form of pn_eval."""
    if n < 1:
        raise ValueError("n must be positive")
    if x == 0 or y == 0:
        raise ValueError("x and y must be nonzero")
    us = np.array(_roots(complex(x), n))
    vs = np.array(_roots(complex(y), n))
    vals = np.asarray(P.evaluate_grid(us[:, None], vs[None, :]), dtype=complex).ravel()
    if np.any(vals == 0):
        return LogValue(-math.inf, 0.0)
    log_abs = math.fsum(np.log(np.abs(vals)))
    phase = math.fsum(np.angle(vals))
    phase = math.remainder(phase, 2 * math.pi)
    return LogValue(log_abs, phase)


def pn_eval(P: LaurentPoly2, n: int, x, y, *, dps: Optional[int] = None):
    """Product of P(u, v) over all u^n = x, v^n = y.

    For n = 1 the value is P(x, y) itself, exact when the inputs are.
    With ``dps`` the product is formed in mpmath at that precision.
    """
    if n == 1:
        return P(x, y)
    if dps is not None:
        with mpmath.workdps(dps):
            return _pn_mp(P, n, x, y)
    return pn_log(P, n, x, y).value


def _pn_mp(P: LaurentPoly2, n: int, x, y):
    terms = [(a, b, _to_mp(c)) for (a, b), c in P]
    x, y = mpmath.mpc(x), mpmath.mpc(y)

    def roots(z):
        r = abs(z) ** (mpmath.mpf(1) / n)
        base = mpmath.arg(z) / n
        return [r * mpmath.expj(base + 2 * mpmath.pi * k / n) for k in range(n)]

    out = mpmath.mpc(1)
    for u in roots(x):
        for v in roots(y):
            out *= mpmath.fsum(c * u**a * v**b for a, b, c in terms)
    return out


@dataclass
class SectorValues:
    n: int
    z: Dict[Tuple[int, int], object]
    # for n > 1 the values are also kept in log form to survive large n
    log_abs: Optional[Dict[Tuple[int, int], float]] = None
    sign: Optional[Dict[Tuple[int, int], int]] = None

    def __getitem__(self, key):
        return self.z[key]


def sector_values(P: LaurentPoly2, n: int, *, dps: Optional[int] = None) -> SectorValues:
    """The four products Z_n^{(a,b)} = P_n((-1)^a, (-1)^b)."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return SectorValues(1, {(a, b): P((-1) ** a, (-1) ** b) for a, b in SECTORS})
    if dps is not None:
        z = {}
        with mpmath.workdps(dps):
            for a, b in SECTORS:
                v = _pn_mp(P, n, (-1) ** a, (-1) ** b)
                if abs(v.imag) > mpmath.mpf(10) ** (-dps // 2) * max(abs(v), mpmath.mpf(10) ** (-dps)):
                    raise AssertionError(f"sector {(a, b)} has imaginary part {v.imag}")
                z[(a, b)] = v.real
        return SectorValues(n, z)
    z, log_abs, sign = {}, {}, {}
    for a, b in SECTORS:
        lv = pn_log(P, n, (-1) ** a, (-1) ** b)
        if lv.log_abs != -math.inf and abs(math.sin(lv.phase)) > IMAG_TOL:
            raise AssertionError(f"sector {(a, b)} has phase {lv.phase!r}")
        log_abs[(a, b)] = lv.log_abs
        sign[(a, b)] = 0 if lv.log_abs == -math.inf else (1 if math.cos(lv.phase) > 0 else -1)
        z[(a, b)] = sign[(a, b)] * math.exp(lv.log_abs) if lv.log_abs < 700 else sign[(a, b)] * math.inf
    return SectorValues(n, z, log_abs, sign)


def signed_partition(sv: SectorValues):
    """½(-Z00 + Z01 + Z10 + Z11) without taking the absolute value."""
    z = sv.z
    total = -z[(0, 0)] + z[(0, 1)] + z[(1, 0)] + z[(1, 1)]
    if isinstance(total, int):
        total = Fraction(total)
    return total / 2


def log_partition_function(P: LaurentPoly2, n: int, *, dps: Optional[int] = None) -> float:
    """log Z of the n-fold cover, computed without forming Z when it would overflow."""
    sv = sector_values(P, n, dps=dps)
    if sv.log_abs is None:
        val = abs(signed_partition(sv))
        if val <= 0:
            raise NonPositivePartition("partition function is not positive")
        return float(mpmath.log(val)) if dps is not None else math.log(val)
    coeff = {(0, 0): -1, (0, 1): 1, (1, 0): 1, (1, 1): 1}
    finite = [k for k in SECTORS if sv.log_abs[k] != -math.inf]
    if not finite:
        raise NonPositivePartition("all sector products vanish")
    top = max(sv.log_abs[k] for k in finite)
    s = math.fsum(coeff[k] * sv.sign[k] * math.exp(sv.log_abs[k] - top) for k in finite)
    if s == 0:
        raise NonPositivePartition("partition function is not positive")
    return top + math.log(abs(s) / 2)


def partition_function(P: LaurentPoly2, n: int, *, dps: Optional[int] = None):
    """½|-Z00 + Z01 + Z10 + Z11|, the weighted matching count of the n-fold cover."""
    sv = sector_values(P, n, dps=dps)
    if sv.log_abs is None:
        return abs(signed_partition(sv))
    try:
        return math.exp(log_partition_function(P, n))
    except NonPositivePartition:
        return 0.0  # no perfect matchings


def brute_force_partition(g: TorusGraph, W: EdgeWeighting, **bounds) -> Fraction:
    """Sum of matching weights by explicit enumeration (exact)."""
    allowed = positive_edges(g, W)
    total = Fraction(0)
    for M in iter_matchings(g, allowed, **bounds):
        c, _, _ = matching_monomial(g, M, W)
        total += c
    return total


def free_energy_gap(P: LaurentPoly2, n: int, m_ref, *, dps: Optional[int] = None):
    """|(1/n^2) log Z_n - m_ref|."""
    if dps is None:
        return abs(log_partition_function(P, n) / (n * n) - float(m_ref))
    with mpmath.workdps(dps):
        sv = sector_values(P, n, dps=dps)
        z = abs(signed_partition(sv))
        if z <= 0:
            raise NonPositivePartition("partition function is not positive")
        return abs(mpmath.log(z) / (n * n) - mpmath.mpf(m_ref))


def lifted_determinant(g: TorusGraph, W: EdgeWeighting, x: complex, y: complex) -> complex:
    """det of the Kasteleyn matrix of the n-fold cover at (x, y), via numpy."""
    return complex(np.linalg.det(kasteleyn_matrix_numeric(g, W, x, y)))
