import math
import random
from fractions import Fraction

import pytest

from dimermahler.lseries import (
    NoConsistentConductor,
    PlaneCubic,
    ap_table,
    conductor_sign_search,
    count_points,
    count_points_naive,
    default_candidates,
    detect_rational,
    dirichlet_coeffs,
    discriminant,
    hasse_violations,
    l_prime_zero,
    primes_up_to,
    probe,
    spectral_cubic,
    theta_inconsistency,
)

CURVE = spectral_cubic(3, 5)


def _weierstrass_ap(p):
    # y^2 + xy + y = x^3 + 4x - 6, a model of conductor 14
    n = 1 + sum(1 for x in range(p) for y in range(p) if (y * y + x * y + y - x**3 - 4 * x + 6) % p == 0)
    return p + 1 - n


def test_spectral_cubic_formatting():
    assert CURVE.format() == "X^2*Y - 5*X*Y*Z + X*Z^2 + Y^2*Z"
    assert spectral_cubic(6, 10).format() == "X^2*Y + X^2*Z + X*Y^2 - 10*X*Y*Z + X*Z^2 + Y^2*Z + Y*Z^2"


@pytest.mark.parametrize("family,s,disc", [(3, 5, -98), (3, 3, 0), (6, 10, -1168128), (4, 10, -8400), (4, 11, -12705)])
def test_discriminants(family, s, disc):
    assert discriminant(spectral_cubic(family, s)) == disc


def test_discriminant_vanishes_exactly_on_singular_cubics():
    # a nodal cubic Y^2 Z = X^3 + X^2 Z and a smooth Fermat cubic
    nodal = PlaneCubic.from_dict({(0, 2, 1): 1, (3, 0, 0): -1, (2, 0, 1): -1})
    fermat = PlaneCubic.from_dict({(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1})
    assert discriminant(nodal) == 0
    assert discriminant(fermat) != 0
    assert discriminant(nodal, seed=3) == 0


def test_singular_member_has_every_prime_bad():
    t = ap_table(spectral_cubic(3, 3), 50)
    assert t.disc == 0 and t.bad_primes() == primes_up_to(50)


def test_ap_against_weierstrass_model():
    t = ap_table(CURVE, 200)
    for p in primes_up_to(200):
        assert t.ap(p) == _weierstrass_ap(p), p
    assert t.bad_primes() == [2, 7]
    assert t.entries[2].reduction == "non-split node" and t.entries[7].reduction == "split node"


@pytest.mark.parametrize("family,s", [(6, 10), (6, 11), (3, 5), (4, 10), (3, 3)])
def test_fast_count_matches_naive(family, s):
    c = spectral_cubic(family, s)
    for p in primes_up_to(60) + [101, 211]:
        assert count_points(c, p) == count_points_naive(c, p)


def test_points_over_f2():
    # Fermat cubic over F_2: every point with an odd number of nonzero coordinates
    fermat = PlaneCubic.from_dict({(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 3): 1})
    assert count_points_naive(fermat, 2) == count_points(fermat, 2) == 3
    assert count_points_naive(CURVE, 2) == 4
    with pytest.raises(ValueError):
        count_points(CURVE, 10)


def test_hasse_and_determinism():
    t = ap_table(spectral_cubic(6, 11), 3000)
    assert hasse_violations(t) == []
    assert ap_table(spectral_cubic(6, 11), 3000).entries == t.entries
    with pytest.raises(ValueError):
        ap_table(CURVE, 10**5 + 1)


def test_dirichlet_coefficients_are_multiplicative():
    t = ap_table(CURVE, 1000)
    a = dirichlet_coeffs(t, 1000)
    for m in range(1, 32):
        for n in range(1, 1000 // m + 1):
            if math.gcd(m, n) == 1:
                assert a[m * n] == a[m] * a[n]
    assert a[9] == a[3] ** 2 - 3
    assert a[4] == a[2] ** 2  # bad prime: a_{p^k} = a_p^k
    assert a[49] == 1


def test_dirichlet_needs_all_primes():
    with pytest.raises(KeyError):
        dirichlet_coeffs(ap_table(CURVE, 50), 100)


def test_l_prime_of_zero_series_and_cutoff_guard():
    est = l_prime_zero([0] * 400, 14, 1)
    assert est.value == 0
    with pytest.raises(ValueError):
        l_prime_zero([0] * 400, 14, 1, cutoff=20)
    with pytest.raises(ValueError):
        l_prime_zero([0] * 400, 14, 0)


def test_functional_equation_selects_the_conductor():
    t = ap_table(CURVE, 3000)
    a = dirichlet_coeffs(t, 3000)
    assert theta_inconsistency(a, 14, 1) < 1e-10
    assert theta_inconsistency(a, 14, -1) > 1e-3
    assert theta_inconsistency(a, 28, 1) > 1e-3
    search = conductor_sign_search(t)
    assert (search.N, search.eps) == (14, 1)
    padded = conductor_sign_search(t, [7, 14, 28, 56, 98])
    assert padded.N == 14
    est = l_prime_zero(a, 14, 1)
    assert est.stable and est.value > 0
    assert 14 in default_candidates(t)


def test_negative_control_is_rejected():
    t = ap_table(CURVE, 2000)
    rng = random.Random(4)
    fake = t.with_ap({p: rng.randint(-int(2 * math.sqrt(p)), int(2 * math.sqrt(p))) for p in t.entries})
    with pytest.raises(NoConsistentConductor):
        conductor_sign_search(fake)


def test_probe_ratio():
    pr = probe(3, 5, 3000)
    assert (pr.N, pr.eps) == (14, 1)
    assert pr.rational == 7
    assert abs(pr.ratio - 7) < 1e-6


@pytest.mark.parametrize("x,den,expected", [
    (0.4999995, 10, Fraction(1, 2)),
    (3.14159265, 10, None),
    (Fraction(22, 7), 10, Fraction(22, 7)),
    (7, 1, Fraction(7)),
    (-2.3333334, 12, Fraction(-7, 3)),
])
def test_detect_rational(x, den, expected):
    assert detect_rational(x, den) == expected


def test_detect_rational_rejects_bad_denominator():
    with pytest.raises(ValueError):
        detect_rational(0.5, 0)
