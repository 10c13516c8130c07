"""The acceptance suite: eleven end-to-end checks with tolerances and time limits.

Each check returns a ``CriterionResult``; a check that overruns its time
budget fails even when its numbers are right.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import mpmath

from .kasteleyn import (
    EDGE_LABELS,
    FAMILIES,
    VERTICES,
    EdgeWeighting,
    char_poly,
    example_expected,
    example_weighting,
    family_polynomial,
    gauge_transform,
    laurent_char_poly,
    scale_all,
    symbolic_char_poly,
)
from .laurent import LaurentPoly2
from .lattice_graph import build_torus_graph
from .lseries import (
    NoConsistentConductor,
    ap_table,
    conductor_sign_search,
    dirichlet_coeffs,
    hasse_violations,
    l_prime_zero,
    probe,
    spectral_cubic,
)
from .mahler import mahler_jensen, mahler_quadrature
from .qseries import eisenstein, family4_normalization, q_product, verify_mahler_product
from .torus_partition import (
    brute_force_partition,
    free_energy_gap,
    lifted_determinant,
    partition_function,
    pn_eval,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    limit: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d}. {self.title} ({self.seconds:.2f}s / {self.limit:g}s): {self.detail}"


def _rational(rng: random.Random, lo: int = 1, hi: int = 9) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, hi))


def _signed_rational(rng: random.Random) -> Fraction:
    v = _rational(rng)
    return v if rng.random() < 0.5 else -v


def criterion_1(rng: random.Random) -> Tuple[bool, str]:
    S = symbolic_char_poly()
    neg = [t for t in S.terms if t.sign < 0]
    neg_ok = len(neg) == 21 and all((t.a, t.b) == (1, 1) for t in neg)
    x3 = [t for t in S.terms if t.homogeneous_exponent() == (3, 0, 0)]
    x3_ok = len(x3) == 1 and sorted(x3[0].labels) == sorted(["Fi", "Eh", "Dg", "Cf", "Be", "Ad", "Ic", "Hb", "Ga"])
    ones = S.specialize(EdgeWeighting.uniform(1)).homogenize(3)
    coeffs = sorted(int(c) for c in ones.values())
    ones_ok = coeffs == [-21] + [1] * 3 + [3] * 6
    ok = len(S) == 42 and neg_ok and x3_ok and ones_ok
    return ok, f"{len(S)} terms, {len(neg)} negative, X^3 term ok={x3_ok}, all-ones coefficients {coeffs}"


def criterion_2(rng: random.Random) -> Tuple[bool, str]:
    g = build_torus_graph(1)
    failures: Dict[int, int] = {f: 0 for f in FAMILIES}
    for _ in range(10):
        m, w = _signed_rational(rng), _signed_rational(rng)
        for family in FAMILIES:
            W, _ = example_weighting(family, m, w)
            if char_poly(g, W).homogenize(3) != example_expected(family, m, w):
                failures[family] += 1
    ok = not any(failures.values())
    detail = ", ".join(f"family {f}: {10 - k}/10" for f, k in failures.items())
    return ok, detail


def criterion_3(rng: random.Random) -> Tuple[bool, str]:
    g = build_torus_graph(1)
    W = EdgeWeighting({label: _rational(rng) for label in EDGE_LABELS})
    P = char_poly(g, W)
    bad = 0
    for v in VERTICES:
        for _ in range(5):
            k = _signed_rational(rng)
            if char_poly(g, gauge_transform(W, v, k)) != P.map_coefficients(lambda c: c * k):
                bad += 1
    k = _rational(rng)
    combined = W
    for v in VERTICES:
        combined = gauge_transform(combined, v, k if v.islower() else 1 / k)
    trivial = combined == W and char_poly(g, combined) == P
    c = _rational(rng)
    scaled = char_poly(g, scale_all(W, c)) == P.map_coefficients(lambda a: a * c**9)
    ok = bad == 0 and trivial and scaled
    return ok, f"{18 * 5 - bad}/90 vertex gauges, combined gauge trivial={trivial}, c^9 scaling={scaled}"


def criterion_4(rng: random.Random) -> Tuple[bool, str]:
    g = build_torus_graph(1)
    bad = 0
    for _ in range(25):
        W = EdgeWeighting({label: Fraction(rng.randint(0, 5), rng.randint(1, 4)) for label in EDGE_LABELS})
        if partition_function(laurent_char_poly(W), 1) != brute_force_partition(g, W):
            bad += 1
    ones = partition_function(laurent_char_poly(EdgeWeighting.uniform(1)), 1)
    W2, _ = example_weighting(3, 1, 1)
    ex2 = partition_function(laurent_char_poly(W2), 1)
    ok = bad == 0 and ones == 42 and ex2 == 6
    return ok, f"{25 - bad}/25 random weightings exact, all-ones {ones}, example m=w=1 {ex2}"


def criterion_5(rng: random.Random) -> Tuple[bool, str]:
    g1 = build_torus_graph(1)
    worst = 0.0
    for n in (2, 3):
        gn = build_torus_graph(n)
        for _ in range(20):
            W = EdgeWeighting({label: rng.uniform(0.2, 2.0) for label in EDGE_LABELS})
            P = char_poly(g1, W)
            x = complex(math.cos(a := rng.uniform(0, 2 * math.pi)), math.sin(a))
            y = complex(math.cos(b := rng.uniform(0, 2 * math.pi)), math.sin(b))
            lhs = pn_eval(P, n, x, y)
            rhs = lifted_determinant(gn, W, x, y)
            worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    return worst < 1e-9, f"max relative error {worst:.2e}"


def criterion_6(rng: random.Random) -> Tuple[bool, str]:
    P = family_polynomial(3, 10, shape="example")
    dps = 50
    m_ref = mahler_quadrature(P, 96, dps=dps).value
    gaps = [free_energy_gap(P, n, m_ref, dps=dps) for n in (2, 4, 8, 16, 32)]
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    ok = gaps[-1] < 1e-6 and decreasing
    return ok, "gaps " + ", ".join(mpmath.nstr(gp, 3) for gp in gaps)


def _random_dominant(rng: random.Random) -> LaurentPoly2:
    terms = {}
    for _ in range(rng.randint(1, 3)):
        terms[(rng.randint(-2, 2), rng.randint(-2, 2))] = rng.randint(-3, 3) or 1
    terms.pop((0, 0), None)
    big = sum(abs(c) for c in terms.values()) + rng.randint(1, 3)
    terms[(0, 0)] = big if rng.random() < 0.5 else -big
    return LaurentPoly2(terms)


def criterion_7(rng: random.Random) -> Tuple[bool, str]:
    worst_cross = 0.0
    for family in FAMILIES:
        for s in (8, 10, 15):
            P = family_polynomial(family, s)
            q = mahler_quadrature(P, 128).value
            j = mahler_jensen(P, 256).value
            worst_cross = max(worst_cross, abs(q - j))
    worst_mult = worst_inv = 0.0
    for _ in range(10):
        P, Q = _random_dominant(rng), _random_dominant(rng)
        mp_, mq = mahler_quadrature(P, 64).value, mahler_quadrature(Q, 64).value
        worst_mult = max(worst_mult, abs(mahler_quadrature(P * Q, 64).value - mp_ - mq))
        worst_inv = max(worst_inv, abs(mahler_quadrature(P.inverted(), 64).value - mp_))
    ok = worst_cross < 1e-8 and worst_mult < 1e-9 and worst_inv < 1e-9
    return ok, f"cross-method {worst_cross:.1e}, multiplicativity {worst_mult:.1e}, inversion {worst_inv:.1e}"


def criterion_8(rng: random.Random) -> Tuple[bool, str]:
    parts = []
    ok = True
    for family in FAMILIES:
        Q = q_product(family, 100)
        same = Q.log_derivative() == eisenstein(family, 100)
        integral = all(c.denominator == 1 for c in Q.coeffs)
        ok &= same and integral
        parts.append(f"family {family}: identity={same}, integral={integral}")
    return ok, "; ".join(parts)


def criterion_9(rng: random.Random) -> Tuple[bool, str]:
    checks = [verify_mahler_product(f, s) for f, s in ((6, 11), (3, 10), (4, 10))]
    norms = family4_normalization(10)
    passing = [k for k, c in norms.items() if c.gap < 1e-6]
    ok = all(c.gap < 1e-6 for c in checks) and len(passing) == 1
    detail = ", ".join(f"({c.family},{c.s:g}) gap {c.gap:.1e}" for c in checks)
    return ok, detail + f"; family-4 normalizations passing: {passing}"


def criterion_10(rng: random.Random) -> Tuple[bool, str]:
    first = probe(3, 5, 5000)
    second = probe(3, 5, 10000)
    a = dirichlet_coeffs(ap_table(spectral_cubic(3, 5), 5000), 5000)
    doubled = l_prime_zero(a, first.N, first.eps, 2 * first.estimate.cutoff)
    ratio_cut = first.mahler / doubled.value
    stable = abs(first.ratio - second.ratio) < 1e-3 and abs(first.ratio - ratio_cut) < 1e-3
    detected = first.rational is not None
    table = ap_table(spectral_cubic(3, 5), 2000)
    controls_failed = 0
    for _ in range(3):
        fake = table.with_ap({p: rng.randint(-int(2 * math.sqrt(p)), int(2 * math.sqrt(p))) for p in table.entries})
        try:
            conductor_sign_search(fake)
        except NoConsistentConductor:
            controls_failed += 1
    ok = stable and detected and controls_failed == 3
    return ok, (f"N={first.N}, eps={first.eps:+d}, ratio {first.ratio:.6f} vs {second.ratio:.6f}, "
                f"rational {first.rational}, negative controls rejected {controls_failed}/3")


def criterion_11(rng: random.Random) -> Tuple[bool, str]:
    cases = ((6, 10), (6, 11), (3, 5), (3, 10), (4, 10), (4, 11))
    violations = {}
    for family, s in cases:
        v = hasse_violations(ap_table(spectral_cubic(family, s), 10**4))
        if v:
            violations[(family, s)] = v
    return not violations, "no violations" if not violations else f"violations {violations}"


CRITERIA: List[Tuple[int, str, float, Callable[[random.Random], Tuple[bool, str]]]] = [
    (1, "symbolic determinant golden terms", 1, criterion_1),
    (2, "worked-example characteristic polynomials", 5, criterion_2),
    (3, "gauge and homogeneity", 5, criterion_3),
    (4, "partition function vs enumeration (n=1)", 30, criterion_4),
    (5, "lifted determinant consistency", 30, criterion_5),
    (6, "free-energy convergence", 10, criterion_6),
    (7, "Mahler cross-validation", 60, criterion_7),
    (8, "Eisenstein logarithmic-derivative identity", 5, criterion_8),
    (9, "product / Mahler identity", 60, criterion_9),
    (10, "L-function probe", 300, criterion_10),
    (11, "Hasse bound", 120, criterion_11),
]


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    num, title, limit, fn = next(c for c in CRITERIA if c[0] == number)
    rng = random.Random(seed * 1000 + num)
    start = time.perf_counter()
    try:
        ok, detail = fn(rng)
    except Exception as exc:  # a crash is a failure, reported as such
        ok, detail = False, f"error: {type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    if elapsed > limit:
        ok = False
        detail += f" (over time limit {limit:g}s)"
    return CriterionResult(num, title, ok, detail, elapsed, limit)


def run_all(seed: int = 0, only: Optional[List[int]] = None) -> List[CriterionResult]:
    return [run_criterion(c[0], seed) for c in CRITERIA if only is None or c[0] in only]
