"""Exact truncated q-series and the modular quantities attached to the three
cubic families.

A ``QSeries`` stands for q^lead * sum_k c_k q^(k*step) + O(q^(lead + (N+1)*step)),
with exact rational coefficients.  Exponents live on the grid (1/24)Z, which
is enough for eta quotients and for the half-integral family-4 map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath

from .kasteleyn import FAMILIES, family_polynomial
from .mahler import mahler_quadrature

GRID = 24


class ConvergenceError(RuntimeError):
    pass


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _mpf(v: Fraction):
    return mpmath.mpf(v.numerator) / v.denominator


def _on_grid(v: Fraction) -> bool:
    return (v * GRID).denominator == 1


def _gcd_frac(a: Fraction, b: Fraction) -> Fraction:
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    return Fraction(math.gcd(int(a * den), int(b * den)), den)


def _rational_root(c: Fraction, k: int) -> Fraction:
    """Exact k-th root of a rational, or ValueError."""
    if c < 0:
        if k % 2 == 0:
            raise ValueError(f"no real {k}-th root of {c}")
        return -_rational_root(-c, k)

    def iroot(n: int) -> int:
        r = round(n ** (1.0 / k)) if n < 2**1000 else int(mpmath.floor(mpmath.root(n, k)))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**k == n:
                return cand
        raise ValueError(f"{n} is not a perfect {k}-th power")

    return Fraction(iroot(c.numerator), iroot(c.denominator))


@dataclass(frozen=True)
class QSeries:
    lead: Fraction
    step: Fraction
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "lead", _frac(self.lead))
        object.__setattr__(self, "step", _frac(self.step))
        object.__setattr__(self, "coeffs", tuple(_frac(c) for c in self.coeffs))
        if self.step <= 0:
            raise ValueError("step must be positive")
        if not (_on_grid(self.lead) and _on_grid(self.step)):
            raise ValueError("exponents must lie on the grid (1/24)Z")
        if self.coeffs and self.coeffs[0] == 0:
            raise ValueError("leading coefficient must be nonzero; use QSeries.make")

    @classmethod
    def make(cls, lead, step, coeffs: Iterable) -> "QSeries":
        """Build a series, stripping leading zeros (each costs nothing in precision)."""
        lead, step = _frac(lead), _frac(step)
        coeffs = [_frac(c) for c in coeffs]
        k = 0
        while k < len(coeffs) and coeffs[k] == 0:
            k += 1
        return cls(lead + k * step, step, tuple(coeffs[k:]))

    @classmethod
    def constant(cls, c, order: int) -> "QSeries":
        return cls.make(0, 1, [c] + [0] * order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def precision(self) -> Fraction:
        """First exponent whose coefficient is unknown."""
        return self.lead + len(self.coeffs) * self.step

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, exponent) -> Fraction:
        exponent = _frac(exponent)
        if exponent >= self.precision:
            raise ValueError(f"exponent {exponent} is beyond the truncation order")
        k = (exponent - self.lead) / self.step
        if k < 0 or k.denominator != 1:
            return Fraction(0)
        return self.coeffs[int(k)]

    def items(self) -> List[Tuple[Fraction, Fraction]]:
        """(exponent, coefficient) pairs for the nonzero coefficients."""
        return [(self.lead + k * self.step, c) for k, c in enumerate(self.coeffs) if c]

    def truncate(self, order: int) -> "QSeries":
        return QSeries(self.lead, self.step, self.coeffs[: order + 1])

    def _regrid(self, step: Fraction) -> List[Fraction]:
        ratio = self.step / step
        if ratio.denominator != 1:
            raise ValueError("incompatible step")
        r = int(ratio)
        out = [Fraction(0)] * ((len(self.coeffs) - 1) * r + 1) if self.coeffs else []
        for k, c in enumerate(self.coeffs):
            out[k * r] = c
        # the finer grid is only known up to the old precision
        out += [Fraction(0)] * (r - 1)
        return out

    # arithmetic
    def __add__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            n = max(1, math.ceil(self.precision / self.step))
            other = QSeries.make(0, self.step, [other] + [0] * (n - 1))
        step = _gcd_frac(self.step, other.step)
        if ((self.lead - other.lead) / step).denominator != 1:
            raise ValueError("series live on incompatible exponent cosets")
        prec = min(self.precision, other.precision)
        lead = min(self.lead, other.lead)
        n = int((prec - lead) / step)
        out = [Fraction(0)] * n
        for s in (self, other):
            off = int((s.lead - lead) / step)
            for k, c in enumerate(s._regrid(step)):
                if off + k < n:
                    out[off + k] += c
        return QSeries.make(lead, step, out)

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries(self.lead, self.step, tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "QSeries":
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = _frac(c)
        if c == 0:
            raise ValueError("scaling by zero")
        return QSeries(self.lead, self.step, tuple(c * a for a in self.coeffs))

    def __mul__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            return self.scale(other)
        step = _gcd_frac(self.step, other.step)
        a, b = self._regrid(step), other._regrid(step)
        n = min(len(a), len(b))
        out = [sum((a[i] * b[k - i] for i in range(k + 1) if a[i] and b[k - i]), Fraction(0)) for k in range(n)]
        return QSeries.make(self.lead + other.lead, step, out)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        if self.is_zero():
            raise ZeroDivisionError("inverse of the zero series")
        a = self.coeffs
        inv0 = 1 / a[0]
        out = [inv0]
        for k in range(1, len(a)):
            out.append(-inv0 * sum(a[j] * out[k - j] for j in range(1, k + 1) if a[j]))
        return QSeries(-self.lead, self.step, tuple(out))

    def __truediv__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            return self.scale(1 / _frac(other))
        return self * other.inverse()

    def __pow__(self, r) -> "QSeries":
        """Integer or rational power; the leading coefficient's root must be rational."""
        r = _frac(r)
        if self.is_zero():
            raise ValueError("power of the zero series")
        a = self.coeffs
        a0 = a[0]
        if r.denominator == 1:
            g0 = a0 ** int(r)
        else:
            g0 = _rational_root(a0, r.denominator) ** r.numerator
        g = [g0]
        # J. C. P. Miller's recurrence for f^r
        for k in range(1, len(a)):
            acc = sum(((r + 1) * j - k) * a[j] * g[k - j] for j in range(1, k + 1) if a[j])
            g.append(acc / (k * a0))
        return QSeries(self.lead * r, self.step, tuple(g))

    def derivative_q(self) -> "QSeries":
        """q d/dq applied termwise."""
        return QSeries.make(self.lead, self.step,
                            [(self.lead + k * self.step) * c for k, c in enumerate(self.coeffs)])

    def log_derivative(self) -> "QSeries":
        """q f'(q) / f(q), exact."""
        a = self.coeffs
        # the q^lead factor contributes the constant `lead`
        inner = QSeries(0, self.step, tuple(c / a[0] for c in a))
        d = QSeries.make(0, self.step, [k * self.step * c for k, c in enumerate(inner.coeffs)])
        out = d / inner if not d.is_zero() else QSeries.make(0, self.step, [0] * len(a))
        return out + QSeries.make(0, self.step, [self.lead] + [0] * (len(a) - 1))

    def compose_power(self, a) -> "QSeries":
        """Substitute q -> q^a."""
        a = _frac(a)
        if a <= 0:
            raise ValueError("exponent must be positive")
        return QSeries(self.lead * a, self.step * a, self.coeffs)

    def evaluate(self, q, *, dps: Optional[int] = None):
        """Numerical value at real q in (0, 1) (or any q with a chosen branch)."""
        if dps is None:
            q = float(q)
            total = math.fsum(float(c) * q ** float(k * self.step) for k, c in enumerate(self.coeffs) if c)
            return q ** float(self.lead) * total
        with mpmath.workdps(dps):
            q = mpmath.mpf(q)
            qs = q ** _mpf(self.step)
            total = mpmath.fsum(_mpf(c) * qs**k for k, c in enumerate(self.coeffs) if c)
            return q ** _mpf(self.lead) * total

    def format(self, var: str = "q") -> str:
        parts = [f"{c}*{format_power(e, var)}" if e != 0 else f"{c}" for e, c in self.items()]
        parts.append(f"O({format_power(self.precision, var)})")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "leading_exponent": str(self.lead),
            "step": str(self.step),
            "order": self.order,
            "coefficients": [str(c) for c in self.coeffs],
        }


def format_power(e: Fraction, var: str = "q") -> str:
    """q^e, with the exponent parenthesized unless it is a nonnegative integer."""
    return f"{var}^{e}" if e.denominator == 1 and e >= 0 else f"{var}^({e})"


# ---------------------------------------------------------------- characters


def chi(d: int, n: int) -> int:
    """The odd characters mod 3 and mod 4."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if d == -3:
        return (0, 1, -1)[n % 3]
    if d == -4:
        return (0, 1, 0, -1)[n % 4]
    raise ValueError(f"unsupported discriminant {d}")


# ---------------------------------------------------------------- products


def _product_coeffs(exponents: Dict[int, int], order: int) -> List[int]:
    """Coefficients of prod_n (1 - q^n)^{e_n} through q^order, by binomial expansion."""
    out = [0] * (order + 1)
    out[0] = 1
    for n, e in sorted(exponents.items()):
        if e == 0 or n > order:
            continue
        kmax = order // n
        if e > 0:
            factor = [(-1) ** k * comb(e, k) for k in range(min(e, kmax) + 1)]
        else:
            factor = [comb(-e + k - 1, k) for k in range(kmax + 1)]
        new = [0] * (order + 1)
        for i, a in enumerate(out):
            if not a:
                continue
            for k, f in enumerate(factor):
                j = i + k * n
                if j > order:
                    break
                new[j] += a * f
        out = new
    return out


def eta_quotient(spec: Sequence[Tuple[int, int]], order: int) -> QSeries:
    """prod eta(q^a)^e with eta(q) = q^(1/24) prod (1 - q^n)."""
    if order < 1:
        raise ValueError("order must be at least 1")
    exps: Dict[int, int] = {}
    lead = Fraction(0)
    for a, e in spec:
        if a < 1:
            raise ValueError("scales must be positive integers")
        lead += Fraction(a * e, GRID)
        for n in range(a, order + 1, a):
            exps[n] = exps.get(n, 0) + e
    return QSeries.make(lead, 1, _product_coeffs(exps, order))


def product_exponent(family: int, n: int) -> int:
    """Exponent of (1 - q^n) in the family product."""
    _check(family)
    if family == 6:
        return (-1) ** (n - 1) * n * chi(-3, n)
    if family == 3:
        return 9 * n * chi(-3, n)
    return 4 * n * chi(-4, n)


def _check(family: int) -> None:
    if family not in FAMILIES:
        raise ValueError(f"family must be one of 6, 3, 4; got {family!r}")


def q_product(family: int, order: int) -> QSeries:
    """q * prod (1 - q^n)^{e_n} for the family's exponent rule."""
    _check(family)
    if order < 1:
        raise ValueError("order must be at least 1")
    exps = {n: product_exponent(family, n) for n in range(1, order + 1)}
    return QSeries.make(1, 1, _product_coeffs(exps, order))


def eisenstein(family: int, order: int) -> QSeries:
    """The Lambert series 1 + c * sum chi(n) n^2 (+-q)^n / (1 - q^n)."""
    _check(family)
    if order < 1:
        raise ValueError("order must be at least 1")
    out = [Fraction(0)] * (order + 1)
    out[0] = Fraction(1)
    for n in range(1, order + 1):
        if family == 6:
            c = chi(-3, n) * n * n * (-1) ** n
        elif family == 3:
            c = -9 * chi(-3, n) * n * n
        else:
            c = -4 * chi(-4, n) * n * n
        if c:
            for k in range(n, order + 1, n):
                out[k] += c
    return QSeries.make(0, 1, out)


def mcmahon(order: int) -> QSeries:
    """prod (1 - q^n)^(-n): generating function of plane partitions."""
    if order < 1:
        raise ValueError("order must be at least 1")
    return QSeries.make(0, 1, _product_coeffs({n: -n for n in range(1, order + 1)}, order))


T_ETA = {
    6: ((2, 3), (3, 9), (1, -3), (6, -9)),
    3: ((1, 12), (3, -12)),
    4: ((2, 12), (1, -4), (4, -8)),
}
T_SHIFT = {6: 2, 3: 0, 4: 0}  # t = s + shift


@lru_cache(maxsize=None)
def t_of_q(family: int, order: int) -> QSeries:
    """The modular parameter t as a q-series (family 3 via the positive cube root)."""
    _check(family)
    if family == 3:
        cube = eta_quotient(T_ETA[3], order) + 27
        return cube ** Fraction(1, 3)
    return eta_quotient(T_ETA[family], order)


# ---------------------------------------------------------------- inversion


def _seed(family: int, t: float) -> float:
    if family == 6:
        return 1 / t
    if family == 3:
        return 1 / (t**3 - 27)
    return 1 / (t * t)


def _solve_at_order(family: int, target: float, order: int, dps: int = 30) -> float:
    series = t_of_q(family, order)
    dseries = series.derivative_q()
    with mpmath.workdps(dps):
        target = mpmath.mpf(target)

        def f(q):
            return series.evaluate(q, dps=dps) - target

        lo, hi = mpmath.mpf(0), mpmath.mpf(1)
        q = mpmath.mpf(_seed(family, float(target)))
        if not 0 < q < 1:
            raise ConvergenceError("no starting point in (0, 1)")
        for _ in range(200):
            fq = f(q)
            # t decreases in q on the branch through the seed
            if fq > 0:
                lo = q
            else:
                hi = q
            dq = dseries.evaluate(q, dps=dps) / q
            step = fq / dq if dq != 0 else None
            nq = q - step if step is not None else None
            if nq is None or not lo < nq < hi:
                nq = (lo + hi) / 2
            if abs(nq - q) < mpmath.mpf(10) ** (-dps + 5):
                q = nq
                break
            q = nq
        else:
            raise ConvergenceError("Newton iteration did not settle")
        return float(q)


def solve_q(family: int, s: float, order: Optional[int] = None, *, max_order: int = 640) -> float:
    """q0 in (0, 1) with t(q0) equal to the value attached to s.

    The order of the series grows until two successive orders agree to 1e-12
    and the residual |t(q0) - t| is below 1e-12.
    """
    _check(family)
    s = float(s)
    if s <= 0:
        raise ConvergenceError("only s > 0 is supported")
    target = s + T_SHIFT[family]
    if family == 3 and target**3 <= 27:
        raise ConvergenceError(f"s = {s} lies in the temperate regime (t^3 <= 27)")
    order = order or 20
    prev = None
    while order <= max_order:
        q = _solve_at_order(family, target, order)
        series = t_of_q(family, order)
        resid = abs(float(series.evaluate(q, dps=30)) - target)
        if prev is not None and abs(q - prev) < 1e-12 and resid < 1e-12 and q ** (order + 1) < 1e-14:
            return q
        prev = q
        order *= 2
    raise ConvergenceError(
        f"q-expansion did not converge for family {family}, s = {s}; "
        "|s| is probably in the temperate regime where the spectral curve meets the torus"
    )


# ---------------------------------------------------------------- identity check

LOG_EXPONENT = {6: Fraction(1), 3: Fraction(1, 3), 4: Fraction(1, 2)}


def log_q_product(family: int, q, *, dps: int = 30):
    """log Q_family(q) summed directly from the infinite product."""
    _check(family)
    with mpmath.workdps(dps):
        q = mpmath.mpf(q)
        total = mpmath.log(q)
        eps = mpmath.mpf(10) ** (-dps - 5)
        n = 1
        while True:
            qn = q**n
            if qn * n * n < eps:
                break
            e = product_exponent(family, n)
            if e:
                total += e * mpmath.log1p(-qn)
            n += 1
        return total


@dataclass
class ProductCheck:
    family: int
    s: float
    q0: float
    m_poly: float
    m_product: float
    gap: float
    normalization: int = 1


def verify_mahler_product(family: int, s, *, normalization: int = 1, resolution: int = 256) -> ProductCheck:
    """Compare m(P_s) with -e * log Q(q0).

    ``normalization`` 2 evaluates the product at q0^2 instead of q0, the
    alternative variable convention for family 4.
    """
    _check(family)
    if normalization not in (1, 2):
        raise ValueError("normalization must be 1 or 2")
    q0 = solve_q(family, s)
    m_poly = mahler_quadrature(family_polynomial(family, s), resolution).value
    q_eval = q0 if normalization == 1 else q0 * q0
    m_product = float(-LOG_EXPONENT[family] * log_q_product(family, q_eval))
    return ProductCheck(family, float(s), q0, m_poly, m_product, abs(m_poly - m_product), normalization)


def family4_normalization(s=10, tol: float = 1e-6) -> Dict[int, ProductCheck]:
    """Both q conventions for family 4; callers check that exactly one passes."""
    return {k: verify_mahler_product(4, s, normalization=k) for k in (1, 2)}
