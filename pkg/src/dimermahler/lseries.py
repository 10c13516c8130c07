"""Point counts, L-series coefficients and the value L'(E, 0) for the
projective plane cubics attached to the three families.

The completed L-function is Lambda(s) = N^{s/2} (2 pi)^{-s} Gamma(s) L(s) with
Lambda(s) = eps Lambda(2 - s), so L'(0) = Lambda(0) = eps Lambda(2).  Lambda(2)
is split at t = A on the theta function and evaluated with incomplete gamma
functions; the result only stays independent of A when (N, eps) is right.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import exp1

from .kasteleyn import FAMILIES, _fraction_det, family_cubic, family_polynomial
from .laurent import as_exact
from .mahler import mahler_quadrature

Monomial = Tuple[int, int, int]
MONOMIALS: Tuple[Monomial, ...] = tuple(
    sorted((m for m in itertools.product(range(4), repeat=3) if sum(m) == 3), reverse=True)
)


class NoConsistentConductor(RuntimeError):
    pass


# ---------------------------------------------------------------- cubic


@dataclass(frozen=True)
class PlaneCubic:
    coefficients: Tuple[Tuple[Monomial, Fraction], ...]

    def __post_init__(self):
        items = []
        for mono, c in self.coefficients:
            if len(mono) != 3 or sum(mono) != 3 or min(mono) < 0:
                raise ValueError(f"{mono} is not a degree-3 monomial")
            c = as_exact(c)
            if c:
                items.append((tuple(mono), c))
        if not items:
            raise ValueError("the zero form does not define a curve")
        object.__setattr__(self, "coefficients", tuple(sorted(items, reverse=True)))

    @classmethod
    def from_dict(cls, coeffs: Mapping[Monomial, object]) -> "PlaneCubic":
        return cls(tuple(coeffs.items()))

    def as_dict(self) -> Dict[Monomial, Fraction]:
        return dict(self.coefficients)

    def integral(self) -> Dict[Monomial, int]:
        """Primitive integer multiple of the form."""
        cs = self.as_dict()
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in cs.values()), 1)
        ints = {m: int(c * den) for m, c in cs.items()}
        g = reduce(math.gcd, (abs(v) for v in ints.values()))
        return {m: v // g for m, v in ints.items()}

    def evaluate(self, x, y, z):
        return sum(c * x**i * y**j * z**k for (i, j, k), c in self.coefficients)

    def gradient(self) -> List[Dict[Monomial, Fraction]]:
        out = []
        for v in range(3):
            d: Dict[Monomial, Fraction] = {}
            for mono, c in self.coefficients:
                if mono[v]:
                    m = list(mono)
                    m[v] -= 1
                    d[tuple(m)] = d.get(tuple(m), 0) + c * mono[v]
            out.append(d)
        return out

    def format(self) -> str:
        from .laurent import format_homogeneous

        return format_homogeneous(self.as_dict())

    def to_json(self) -> dict:
        return {"terms": [{"i": m[0], "j": m[1], "k": m[2], "c": str(c)} for m, c in self.coefficients]}


def spectral_cubic(family: int, s) -> PlaneCubic:
    """The family's homogeneous cubic with parameter s."""
    return PlaneCubic.from_dict(family_cubic(family, s))


# ---------------------------------------------------------------- discriminant


def _macaulay(grads: Sequence[Mapping[Monomial, Fraction]]) -> Tuple[Fraction, Fraction]:
    """Macaulay matrix determinant for three ternary quadrics and its extraneous minor."""
    mons = sorted((m for m in itertools.product(range(5), repeat=3) if sum(m) == 4), reverse=True)
    idx = {m: i for i, m in enumerate(mons)}
    M = [[Fraction(0)] * len(mons) for _ in mons]
    reduced = []
    for r, mu in enumerate(mons):
        big = [k for k in range(3) if mu[k] >= 2]
        if len(big) >= 2:
            reduced.append(r)
        i = big[0]
        shift = list(mu)
        shift[i] -= 2
        for mono, c in grads[i].items():
            M[r][idx[tuple(a + b for a, b in zip(mono, shift))]] += c
    E = [[M[r][c] for c in reduced] for r in reduced]
    return _fraction_det(M), _fraction_det(E)


def _substitute(cubic: Mapping[Monomial, Fraction], mat: Sequence[Sequence[int]]) -> Dict[Monomial, Fraction]:
    """cubic(mat . (X, Y, Z)) as a new coefficient map."""
    rows = [{(1, 0, 0): mat[r][0], (0, 1, 0): mat[r][1], (0, 0, 1): mat[r][2]} for r in range(3)]

    def mul(p, q):
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                out[m] = out.get(m, 0) + c1 * c2
        return out

    out: Dict[Monomial, Fraction] = {}
    for (i, j, k), c in cubic.items():
        term = {(0, 0, 0): Fraction(c)}
        for r, e in ((0, i), (1, j), (2, k)):
            for _ in range(e):
                term = mul(term, rows[r])
        for m, v in term.items():
            out[m] = out.get(m, 0) + v
    return {m: v for m, v in out.items() if v}


def discriminant(c: PlaneCubic, *, seed: int = 0) -> int:
    """Discriminant of the primitive integral form: resultant of the gradient / 27.

    The Macaulay quotient needs a nonzero extraneous minor; if it vanishes the
    form is moved by a random unimodular substitution, which leaves the
    discriminant unchanged.
    """
    base = {m: Fraction(v) for m, v in c.integral().items()}
    rng = random.Random(seed)
    for attempt in range(50):
        if attempt == 0:
            form = base
        else:
            a, b, cc, d, e, f = (rng.randint(-3, 3) for _ in range(6))
            upper = [[1, a, b], [0, 1, cc], [0, 0, 1]]
            lower = [[1, 0, 0], [d, 1, 0], [e, f, 1]]
            mat = [[sum(upper[i][k] * lower[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
            form = _substitute(base, mat)
        grads = PlaneCubic.from_dict(form).gradient()
        res, extra = _macaulay(grads)
        if extra != 0:
            value = res / extra / 27
            if value.denominator != 1:
                raise ArithmeticError(f"non-integral discriminant {value}")
            return int(value)
    raise ArithmeticError("could not find a substitution with nonzero extraneous factor")


# ---------------------------------------------------------------- point counts


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    r = int(math.isqrt(p))
    return all(p % d for d in range(3, r + 1, 2))


def primes_up_to(n: int) -> List[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(math.isqrt(n)) + 1):
        if sieve[i]:
            sieve[i * i::i] = False
    return [int(p) for p in np.flatnonzero(sieve)]


def _mod_form(c: PlaneCubic, p: int) -> Dict[Monomial, int]:
    return {m: v % p for m, v in c.integral().items() if v % p}


def _eval_mod(form: Mapping[Monomial, int], x, y, z, p: int):
    total = 0
    for (i, j, k), c in form.items():
        total = (total + c * (x**i % p) * (y**j % p) % p * (z**k % p)) % p
    return total


def _check_prime(p: int) -> None:
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p >= 10**5:
        raise ValueError("p must be below 10^5")


def projective_points(p: int):
    """The p^2 + p + 1 points of P^2(F_p) as three int64 arrays, normalized."""
    a = np.arange(p, dtype=np.int64)
    xx, yy = np.meshgrid(a, a, indexing="ij")
    xs = np.concatenate([xx.ravel(), a, [1]])
    ys = np.concatenate([yy.ravel(), np.ones(p, dtype=np.int64), [0]])
    zs = np.concatenate([np.ones(p * p, dtype=np.int64), np.zeros(p, dtype=np.int64), [0]])
    return xs, ys, zs


def count_points_naive(c: PlaneCubic, p: int) -> int:
    """Scan all of P^2(F_p)."""
    _check_prime(p)
    form = _mod_form(c, p)
    xs, ys, zs = projective_points(p)
    return int(np.count_nonzero(_eval_mod(form, xs, ys, zs, p) == 0))


def _powmod(base: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(base)
    b = base % p
    while e:
        if e & 1:
            out = out * b % p
        b = b * b % p
        e >>= 1
    return out


def _quadratic_variable(form: Mapping[Monomial, int]) -> Optional[int]:
    for v in (1, 0, 2):
        if all(m[v] <= 2 for m in form):
            return v
    return None


def count_points(c: PlaneCubic, p: int) -> int:
    """Number of projective F_p-points.

    When the form is at most quadratic in some variable, each affine fibre is
    counted with a Legendre symbol; otherwise (and for p = 2) all points are
    scanned.
    """
    _check_prime(p)
    form = _mod_form(c, p)
    if not form:
        return p * p + p + 1
    v = _quadratic_variable(form)
    if p == 2 or v is None:
        return count_points_naive(c, p)
    # move the quadratic variable to Y, keep Z as the dehomogenizing one
    perm = {1: (0, 1, 2), 0: (1, 0, 2), 2: (0, 2, 1)}[v]
    form = {(m[perm[0]], m[perm[1]], m[perm[2]]): cf for m, cf in form.items()}
    x = np.arange(p, dtype=np.int64)
    coef = [np.zeros(p, dtype=np.int64) for _ in range(3)]  # y^0, y^1, y^2 with z = 1
    for (i, j, k), cf in form.items():
        coef[j] = (coef[j] + cf * _powmod(x, i, p)) % p
    C, B, A = coef
    disc = (B * B - 4 * A * C) % p
    leg = _powmod(disc, (p - 1) // 2, p)
    leg = np.where(leg == p - 1, -1, leg)
    quad = A != 0
    lin = (~quad) & (B != 0)
    const = (~quad) & (B == 0)
    affine = int(np.sum(1 + leg[quad])) + int(np.count_nonzero(lin)) + p * int(np.count_nonzero(const & (C == 0)))
    # points with z = 0 in the permuted coordinates
    at_inf = _eval_mod(form, x, np.ones(p, dtype=np.int64), np.zeros(p, dtype=np.int64), p)
    infinity = int(np.count_nonzero(at_inf == 0)) + (1 if _eval_mod(form, 1, 0, 0, p) == 0 else 0)
    return affine + infinity


def singular_points(c: PlaneCubic, p: int) -> List[Tuple[int, int, int]]:
    """F_p-rational points where the form and its gradient all vanish."""
    _check_prime(p)
    form = _mod_form(c, p)
    grads = [_mod_form_dict(g, p) for g in c.gradient()]
    xs, ys, zs = projective_points(p)
    mask = _eval_mod(form, xs, ys, zs, p) == 0
    for g in grads:
        mask &= _eval_mod(g, xs, ys, zs, p) == 0
    return [(int(a), int(b), int(d)) for a, b, d in zip(xs[mask], ys[mask], zs[mask])]


def _mod_form_dict(d: Mapping[Monomial, Fraction], p: int) -> Dict[Monomial, int]:
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (Fraction(v).denominator for v in d.values()), 1)
    return {m: int(Fraction(v) * den) % p for m, v in d.items() if int(Fraction(v) * den) % p}


def count_smooth_points(c: PlaneCubic, p: int) -> int:
    return count_points_naive(c, p) - len(singular_points(c, p))


# ---------------------------------------------------------------- a_p table


@dataclass(frozen=True)
class APEntry:
    count: int
    ap: int
    bad: bool
    reduction: str = "good"


@dataclass
class APTable:
    cubic: PlaneCubic
    entries: Dict[int, APEntry]
    disc: int

    @property
    def p_max(self) -> int:
        return max(self.entries) if self.entries else 1

    def bad_primes(self) -> List[int]:
        return [p for p, e in self.entries.items() if e.bad]

    def ap(self, p: int) -> int:
        return self.entries[p].ap

    def with_ap(self, values: Mapping[int, int]) -> "APTable":
        """Copy with some a_p replaced; used for negative controls."""
        entries = dict(self.entries)
        for p, v in values.items():
            e = entries[p]
            entries[p] = APEntry(e.count, int(v), e.bad, e.reduction)
        return APTable(self.cubic, entries, self.disc)


def _reduction_type(c: PlaneCubic, p: int) -> Tuple[int, str]:
    sing = singular_points(c, p)
    smooth = count_points_naive(c, p) - len(sing)
    ap = p - smooth
    if len(sing) != 1:
        kind = "no rational singular point" if not sing else "several singular points"
    else:
        kind = {1: "split node", -1: "non-split node", 0: "cusp"}.get(ap, "other")
    return ap, kind


def ap_table(c: PlaneCubic, p_max: int, *, bad_primes: Optional[Iterable[int]] = None) -> APTable:
    """Counts and a_p for every prime up to p_max.

    Good primes use a_p = p + 1 - #points.  At primes dividing the
    discriminant a_p = p - #(smooth points), i.e. +1, -1 or 0 for split
    nodal, non-split nodal and cuspidal reduction.
    """
    if p_max > 10**5:
        raise ValueError("p_max must be at most 10^5")
    disc = discriminant(c)
    entries: Dict[int, APEntry] = {}
    forced = set(bad_primes or ())
    for p in primes_up_to(p_max):
        n = count_points(c, p)
        if (disc == 0 or disc % p == 0) or p in forced:
            ap, kind = _reduction_type(c, p)
            entries[p] = APEntry(n, ap, True, kind)
        else:
            entries[p] = APEntry(n, p + 1 - n, False)
    return APTable(c, entries, disc)


def hasse_violations(t: APTable) -> List[int]:
    return [p for p, e in t.entries.items() if not e.bad and e.ap * e.ap > 4 * p]


# ---------------------------------------------------------------- Dirichlet series


def dirichlet_coeffs(t: APTable, n_max: int) -> List[int]:
    """a_0 (unused, 0), a_1, ..., a_{n_max} from the Euler product."""
    primes = primes_up_to(n_max)
    for p in primes:
        if p not in t.entries:
            raise KeyError(f"prime {p} missing from the a_p table")
    a = [0] * (n_max + 1)
    if n_max >= 1:
        a[1] = 1
    spf = list(range(n_max + 1))
    for p in primes:
        if p * p > n_max:
            break
        for k in range(p * p, n_max + 1, p):
            if spf[k] == k:
                spf[k] = p
    for n in range(2, n_max + 1):
        p = spf[n]
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        if m > 1:
            a[n] = a[m] * a[n // m]
            continue
        e = t.entries[p]
        if k == 1:
            a[n] = e.ap
        elif e.bad:
            a[n] = e.ap * a[n // p]
        else:
            a[n] = e.ap * a[n // p] - p * a[n // (p * p)]
    return a


def theta_values(a: Sequence[int], N: int, ts: Sequence[float]) -> np.ndarray:
    n = np.arange(1, len(a), dtype=float)
    coeffs = np.asarray(a[1:], dtype=float)
    return np.array([float(np.sum(coeffs * np.exp(-2 * math.pi * n * t / math.sqrt(N)))) for t in ts])


def theta_inconsistency(a: Sequence[int], N: int, eps: int, ts: Sequence[float] = (1.1, 1.25, 1.4)) -> float:
    """max |theta(1/t) - eps t^2 theta(t)| relative to the size of the terms."""
    ts = list(ts)
    inv = theta_values(a, N, [1 / t for t in ts])
    direct = theta_values(a, N, ts)
    scale = max(1e-300, float(np.max(np.abs(inv))))
    return float(max(abs(u - eps * t * t * d) for u, d, t in zip(inv, direct, ts)) / scale)


def terms_needed(N: int, t_min: float = 1 / 1.4, digits: float = 20) -> int:
    """Coefficient count for exp(-2 pi n t_min / sqrt N) to drop below 10^-digits."""
    return int(math.ceil(digits * math.log(10) * math.sqrt(N) / (2 * math.pi * t_min))) + 1


def lambda_two(a: Sequence[int], N: int, eps: int, cutoff: int, A: float = 1.0) -> float:
    """Lambda(2) from the theta function split at t = A."""
    n = np.arange(1, min(cutoff, len(a) - 1) + 1, dtype=float)
    coeffs = np.asarray(a[1 : len(n) + 1], dtype=float)
    cn = 2 * math.pi * n / math.sqrt(N)
    x = cn * A
    # Gamma(2, x) = (1 + x) e^{-x}
    upper = (1 + x) * np.exp(-x) / (cn * cn)
    lower = exp1(cn / A)
    return float(math.fsum(coeffs * (upper + eps * lower)))


@dataclass
class LPrimeEstimate:
    value: float
    N: int
    eps: int
    cutoff: int
    split_change: float  # |value(A = 1) - value(A = 1.2)|
    cutoff_change: float  # |value(cutoff) - value(2 cutoff)|
    stable: bool


def l_prime_zero(a: Sequence[int], N: int, eps: int, cutoff: Optional[int] = None, *, tol: float = 1e-6) -> LPrimeEstimate:
    """L'(0) = eps * Lambda(2), with a stability certificate."""
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    if cutoff is None:
        cutoff = min(len(a) - 1, max(terms_needed(N), int(10 * math.sqrt(N))))
    if cutoff < 10 * math.sqrt(N):
        raise ValueError(f"cutoff {cutoff} is below 10*sqrt(N) = {10 * math.sqrt(N):.1f}")
    v1 = eps * lambda_two(a, N, eps, cutoff, 1.0)
    v2 = eps * lambda_two(a, N, eps, cutoff, 1.2)
    v3 = eps * lambda_two(a, N, eps, 2 * cutoff, 1.0)
    split = abs(v1 - v2)
    cut = abs(v1 - v3)
    scale = max(1.0, abs(v1))
    stable = split <= tol * scale and cut <= tol * scale and 2 * cutoff <= len(a) - 1
    return LPrimeEstimate(v1, N, eps, cutoff, split, cut, stable)


def default_candidates(t: APTable, bound: int = 10**6) -> List[int]:
    """Products of bad primes with exponents in the ranges allowed for elliptic curves."""
    bad = sorted(t.bad_primes())
    ranges = []
    for p in bad:
        top = {2: 8, 3: 5}.get(p, 2)
        ranges.append([p**e for e in range(1, top + 1)])
    out = set()
    for combo in itertools.product(*ranges):
        N = math.prod(combo)
        if N <= bound:
            out.add(N)
    return sorted(out) or [1]


@dataclass
class ConductorSearch:
    N: int
    eps: int
    inconsistency: float
    diagnostics: Dict[Tuple[int, int], float] = field(default_factory=dict)


def conductor_sign_search(t: APTable, candidates: Optional[Iterable[int]] = None, *,
                          threshold: float = 1e-8) -> ConductorSearch:
    """(N, eps) minimizing the theta-function functional-equation mismatch."""
    cands = sorted(set(candidates)) if candidates is not None else default_candidates(t)
    if not cands:
        raise ValueError("empty candidate set")
    n_avail = t.p_max
    a_full = dirichlet_coeffs(t, n_avail)
    diag: Dict[Tuple[int, int], float] = {}
    for N in cands:
        need = terms_needed(N)
        if need > n_avail:
            continue
        a = a_full[: need + 1]
        for eps in (1, -1):
            diag[(N, eps)] = theta_inconsistency(a, N, eps)
    if not diag:
        raise NoConsistentConductor("no candidate conductor is testable with the available coefficients")
    (N, eps), best = min(diag.items(), key=lambda kv: (kv[1], kv[0][0], -kv[0][1]))
    if best > threshold:
        raise NoConsistentConductor(f"no consistent (N, eps); best {N}, {eps} with mismatch {best:.3g}")
    return ConductorSearch(N, eps, best, diag)


def detect_rational(x, max_den: int) -> Optional[Fraction]:
    """Best rational with denominator <= max_den within 1e-4 * max(1, |x|)."""
    if max_den < 1:
        raise ValueError("max_den must be positive")
    if isinstance(x, (int, Fraction)):
        fx = Fraction(x)
        return fx if fx.denominator <= max_den else _closest(fx, max_den, float(x))
    return _closest(Fraction(x), max_den, float(x))


def _closest(fx: Fraction, max_den: int, x: float) -> Optional[Fraction]:
    r = fx.limit_denominator(max_den)
    return r if abs(float(r) - x) < 1e-4 * max(1.0, abs(x)) else None


# ---------------------------------------------------------------- end-to-end


@dataclass
class LProbe:
    family: int
    s: Fraction
    p_max: int
    N: int
    eps: int
    l_prime: float
    mahler: float
    ratio: float
    rational: Optional[Fraction]
    estimate: LPrimeEstimate
    search: ConductorSearch


def probe(family: int, s, p_max: int = 5000, *, cutoff: Optional[int] = None,
          conductor: Optional[int] = None, sign: Optional[int] = None, resolution: int = 256) -> LProbe:
    """m(F) / L'(E, 0) for one family member."""
    c = spectral_cubic(family, s)
    table = ap_table(c, p_max)
    if conductor is not None and sign is not None:
        a = dirichlet_coeffs(table, table.p_max)
        search = ConductorSearch(conductor, sign, theta_inconsistency(a[: terms_needed(conductor) + 1], conductor, sign))
    else:
        search = conductor_sign_search(table, [conductor] if conductor else None)
    a = dirichlet_coeffs(table, table.p_max)
    est = l_prime_zero(a, search.N, search.eps, cutoff)
    m = mahler_quadrature(family_polynomial(family, s), resolution).value
    ratio = m / est.value if est.value else math.inf
    return LProbe(family, as_exact(s), p_max, search.N, search.eps, est.value, m, ratio,
                  detect_rational(ratio, 64) if math.isfinite(ratio) else None, est, search)
