import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from dimermahler.qseries import (
    ConvergenceError,
    QSeries,
    chi,
    eisenstein,
    eta_quotient,
    log_q_product,
    mcmahon,
    product_exponent,
    q_product,
    solve_q,
    t_of_q,
    verify_mahler_product,
)


def _naive_product(exponents, order):
    """prod (1 - q^n)^e_n by repeated multiplication and long division."""
    out = [1] + [0] * order
    for n, e in exponents.items():
        for _ in range(abs(e)):
            if e > 0:
                out = [out[i] - (out[i - n] if i >= n else 0) for i in range(order + 1)]
            else:
                # divide by (1 - q^n): running sum with stride n
                for i in range(n, order + 1):
                    out[i] += out[i - n]
    return out


def test_chi():
    assert [chi(-3, n) for n in range(7)] == [0, 1, -1, 0, 1, -1, 0]
    assert [chi(-4, n) for n in range(6)] == [0, 1, 0, -1, 0, 1]
    with pytest.raises(ValueError):
        chi(-5, 1)


def test_eta_pentagonal_numbers():
    eta = eta_quotient([(1, 1)], 30)
    assert eta.lead == Fraction(1, 24)
    expected = {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1, 15: -1, 22: 1, 26: 1}
    assert [int(c) for c in eta.coeffs] == [expected.get(k, 0) for k in range(31)]


@pytest.mark.parametrize("family", [6, 3, 4])
def test_product_against_naive_expansion(family):
    order = 25
    exps = {n: product_exponent(family, n) for n in range(1, order + 1)}
    Q = q_product(family, order)
    assert Q.lead == 1
    assert [int(c) for c in Q.coeffs] == _naive_product(exps, order)[: len(Q.coeffs)]


def test_product_exponents():
    assert [product_exponent(6, n) for n in range(1, 7)] == [1, 2, 0, -4, -5, 0]
    assert [product_exponent(3, n) for n in range(1, 5)] == [9, -18, 0, 36]
    assert [product_exponent(4, n) for n in range(1, 5)] == [4, 0, -12, 0]
    with pytest.raises(ValueError):
        q_product(5, 10)


@pytest.mark.parametrize("family", [6, 3, 4])
def test_log_derivative_identity(family):
    Q = q_product(family, 80)
    assert Q.log_derivative() == eisenstein(family, 80)
    assert all(c.denominator == 1 for c in Q.coeffs)


def test_mcmahon():
    M = mcmahon(10)
    assert [int(c) for c in M.coeffs] == [1, 1, 3, 6, 13, 24, 48, 86, 160, 282, 500]
    # q M'/M = sum sigma_2(n) q^n
    sigma2 = [sum(d * d for d in range(1, n + 1) if n % d == 0) for n in range(1, 11)]
    L = M.log_derivative()
    assert [L.coefficient(n) for n in range(1, 11)] == sigma2


@pytest.mark.parametrize("family,lead", [(6, -1), (3, Fraction(-1, 3)), (4, Fraction(-1, 2))])
def test_t_leading_terms(family, lead):
    t = t_of_q(family, 20)
    assert t.lead == lead and t.coeffs[0] == 1


def test_family3_cube():
    t = t_of_q(3, 30)
    cube = t ** 3
    ref = eta_quotient([(1, 12), (3, -12)], 30) + 27
    for e, c in ref.items():
        if e < cube.precision:
            assert cube.coefficient(e) == c


@pytest.mark.parametrize("family,s", [(6, 11), (6, 20), (3, 10), (3, 5), (4, 10), (4, 6)])
def test_solve_q_residual(family, s):
    q = solve_q(family, s)
    assert 0 < q < 1
    t = t_of_q(family, 640)
    shift = 2 if family == 6 else 0
    assert float(t.evaluate(q, dps=30)) == pytest.approx(s + shift, abs=1e-10)


def test_solve_q_monotone_in_s():
    qs = [solve_q(6, s) for s in (8, 10, 14, 20)]
    assert qs == sorted(qs, reverse=True)


@pytest.mark.parametrize("family,s", [(3, 3), (3, 1), (6, 0), (4, -2)])
def test_solve_q_outside_domain(family, s):
    with pytest.raises(ConvergenceError):
        solve_q(family, s)


@pytest.mark.parametrize("family,s", [(6, 11), (3, 10), (4, 10)])
def test_mahler_product_identity(family, s):
    assert verify_mahler_product(family, s).gap < 1e-6


def test_log_product_matches_truncated_series():
    q = 0.05
    direct = log_q_product(6, q)
    series = q_product(6, 60).evaluate(q, dps=30)
    assert float(direct) == pytest.approx(float(mpmath.log(series)), abs=1e-20)


def test_series_evaluation_and_errors():
    s = QSeries.make(Fraction(-1, 2), 1, [0, 2, 3])
    assert s.lead == Fraction(1, 2) and s.coeffs == (2, 3)
    assert s.coefficient(Fraction(3, 2)) == 3
    with pytest.raises(ValueError):
        s.coefficient(Fraction(5, 2))
    with pytest.raises(ValueError):
        QSeries(Fraction(1, 25), 1, (1,))
    assert float(s.evaluate(0.25)) == pytest.approx(2 * 0.5 + 3 * 0.125)
    assert s.format().startswith("2*q^(1/2)")


def _agree(S, T):
    top = min(S.precision, T.precision)
    grid = min(S.step, T.step)
    e = min(S.lead, T.lead)
    while e < top:
        assert S.coefficient(e) == T.coefficient(e)
        e += grid


series = st.lists(st.integers(-5, 5), min_size=1, max_size=8).filter(lambda c: c[0] != 0)


@settings(max_examples=40, deadline=None)
@given(series, series, st.integers(-3, 3))
def test_arithmetic(a, b, k):
    A = QSeries.make(k, 1, a + [0] * 8)
    B = QSeries.make(0, 1, b + [0] * 8)
    _agree((A * B) / B, A)
    _agree(A + B - B, A)
    _agree((A * B).log_derivative(), A.log_derivative() + B.log_derivative())
    if b[0] in (1, 4):  # rational square root of the leading coefficient
        root = B ** Fraction(1, 2)
        _agree(root * root, B)
