import math
import random

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from dimermahler.kasteleyn import FAMILIES, family_polynomial
from dimermahler.laurent import LaurentPoly2
from dimermahler.mahler import UndefinedMeasure, mahler_jensen, mahler_quadrature

X = LaurentPoly2.monomial(1, 0)
Y = LaurentPoly2.monomial(0, 1)
ONE = LaurentPoly2.constant(1)


def _dblquad_oracle(P):
    f = lambda t, s: math.log(abs(P(complex(math.cos(s), math.sin(s)), complex(math.cos(t), math.sin(t)))))
    val, _ = integrate.dblquad(f, 0, 2 * math.pi, 0, 2 * math.pi, epsabs=1e-11, epsrel=1e-11)
    return val / (4 * math.pi**2)


@pytest.mark.parametrize("P,expected", [
    (ONE * 5, math.log(5)),
    (X, 0.0),
    (Y - 2, math.log(2)),
    (Y - LaurentPoly2.constant(0.5), 0.0),
    (Y * Y * 2 - Y * 5 + 2, math.log(4)),
    (X * Y * 3 + 7, math.log(7)),
])
def test_closed_forms(P, expected):
    assert mahler_quadrature(P, 64).value == pytest.approx(expected, abs=1e-12)
    assert mahler_jensen(P, 64).value == pytest.approx(expected, abs=1e-12)


def test_against_adaptive_integration():
    P = LaurentPoly2({(1, 0): 1, (0, 1): 1, (-1, 0): 1, (1, -1): 1, (0, 0): -10})
    ref = _dblquad_oracle(P)
    assert mahler_quadrature(P, 128).value == pytest.approx(ref, abs=1e-9)
    assert mahler_jensen(P, 256).value == pytest.approx(ref, abs=1e-9)


def test_smyth_value():
    # m(1 + x + y) = 3√3/(4π) L(χ_{-3}, 2)
    L = mpmath.nsum(lambda k: 1 / (3 * k + 1) ** 2 - 1 / (3 * k + 2) ** 2, [0, mpmath.inf])
    ref = float(3 * mpmath.sqrt(3) / (4 * mpmath.pi) * L)
    P = ONE + X + Y
    assert mahler_jensen(P, 4096).value == pytest.approx(ref, abs=1e-5)
    est = mahler_quadrature(P, 256)
    assert abs(est.value - ref) < 1e-3


def test_zero_set_on_the_torus_does_not_break_quadrature():
    est = mahler_quadrature(X - Y, 64)
    assert est.perturbed_nodes > 0
    assert abs(est.value) < 0.02
    assert math.isfinite(est.error)


@pytest.mark.parametrize("family", FAMILIES)
def test_methods_agree_on_family_polynomials(family):
    P = family_polynomial(family, 12)
    assert mahler_quadrature(P, 128).value == pytest.approx(mahler_jensen(P, 256).value, abs=1e-9)


def test_temperate_parameter_runs():
    est = mahler_quadrature(family_polynomial(6, 2), 64)
    assert math.isfinite(est.value)
    assert math.isfinite(mahler_jensen(family_polynomial(6, 2), 64).value)


def test_errors():
    with pytest.raises(UndefinedMeasure):
        mahler_quadrature(LaurentPoly2(), 64)
    with pytest.raises(UndefinedMeasure):
        mahler_jensen(LaurentPoly2(), 64)
    with pytest.raises(ValueError):
        mahler_quadrature(X + 3, 8)


def test_high_precision_path_matches_float():
    P = family_polynomial(3, 10, shape="example")
    assert float(mahler_quadrature(P, 48, dps=30).value) == pytest.approx(mahler_quadrature(P, 48).value, abs=1e-12)


terms = st.dictionaries(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2)).filter(lambda e: e != (0, 0)),
    st.integers(-3, 3).filter(bool), min_size=1, max_size=3)


def _dominant(d, sign):
    return LaurentPoly2({**d, (0, 0): sign * (sum(abs(c) for c in d.values()) + 1)})


@settings(max_examples=20, deadline=None)
@given(terms, terms, st.sampled_from([-1, 1]), st.integers(-3, 3), st.integers(-3, 3))
def test_multiplicativity_inversion_and_monomials(d1, d2, sign, a, b):
    P, Q = _dominant(d1, sign), _dominant(d2, 1)
    mP, mQ = mahler_quadrature(P, 64).value, mahler_quadrature(Q, 64).value
    assert mahler_quadrature(P * Q, 64).value == pytest.approx(mP + mQ, abs=1e-9)
    assert mahler_quadrature(P.inverted(), 64).value == pytest.approx(mP, abs=1e-9)
    assert mahler_quadrature(P.shift(a, b), 64).value == pytest.approx(mP, abs=1e-12)
