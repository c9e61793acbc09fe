import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reflectode import Coefficients, InvalidInputError, classify, even_odd, homogeneous_pair
from reflectode.core import C1, C2, C3_MINUS, C3_PLUS

coef = st.floats(-10, 10, allow_nan=False)
times = st.floats(-5, 5, allow_nan=False)


@pytest.mark.parametrize(
    "a, b, tag, omega",
    [(-5, 4, C1, 3.0), (1, 2, C2, math.sqrt(3)), (1, 1, C3_PLUS, 0.0), (1, -1, C3_MINUS, 0.0), (0, 0, C3_MINUS, 0.0)],
)
def test_classify_examples(a, b, tag, omega):
    case = classify(Coefficients(a, b))
    assert case.tag == tag
    assert case.omega == pytest.approx(omega, rel=1e-15)


def test_classify_tolerance_band_is_relative():
    assert classify((1e6, 1e6 + 1e-7)).tag == C3_PLUS
    assert classify((1.0, 1.0 + 1e-8)).tag == C2
    assert classify((1.0, 1.0 + 1e-8), tol=1e-7).tag == C3_PLUS


@pytest.mark.parametrize("bad", [(math.nan, 1.0), (1.0, math.inf), (-math.inf, 0.0)])
def test_non_finite_coefficients_rejected(bad):
    with pytest.raises(InvalidInputError):
        Coefficients(*bad)


def test_negative_tolerance_rejected():
    with pytest.raises(InvalidInputError):
        classify((1, 2), tol=-1.0)


def test_c3_pair_closed_forms():
    pair = homogeneous_pair((1, 1))
    t = np.linspace(-2, 2, 9)
    np.testing.assert_array_equal(pair.u(t), 1 - 2 * t)
    np.testing.assert_array_equal(pair.v(t), np.ones_like(t))


def test_c1_pair_value():
    pair = homogeneous_pair((-5, 4))
    assert pair.u(0.5) == pytest.approx(math.cos(1.5) + math.sin(1.5) / 3, rel=1e-15)


@given(coef, coef)
def test_normalized_at_zero(a, b):
    pair = homogeneous_pair((a, b))
    assert pair.u(0.0) == 1.0
    assert pair.v(0.0) == 1.0


def basis_size(pair, t):
    """Magnitude of the terms ``C`` and ``(|a|+|b|) S`` that the evaluators combine."""
    a, b = pair.coeffs.a, pair.coeffs.b
    return abs(pair.basis.C(t)) + (abs(a) + abs(b)) * abs(pair.basis.S(t))


@settings(max_examples=300)
@given(coef, coef, times)
def test_homogeneous_equations_hold(a, b, t):
    pair = homogeneous_pair((a, b))
    scale = (1 + abs(a) + abs(b) + pair.case.omega) * (1 + basis_size(pair, t))
    assert abs(pair.du(t) + a * pair.u(-t) + b * pair.u(t)) <= 1e-14 * scale
    assert abs(pair.dv(t) - a * pair.v(-t) + b * pair.v(t)) <= 1e-14 * scale


def test_random_residuals_for_oscillatory_pair():
    pair = homogeneous_pair((-5, 4))
    t = np.random.default_rng(0).uniform(-5, 5, 100)
    assert np.max(np.abs(pair.du(t) - 5 * pair.u(-t) + 4 * pair.u(t))) <= 1e-9


@settings(max_examples=300)
@given(coef, coef, times)
def test_pair_identities_relative_to_term_size(a, b, t):
    # the products cancel; the achievable accuracy is relative to their size
    pair = homogeneous_pair((a, b))
    scale = (1 + basis_size(pair, t)) ** 2
    ee = pair.u_even(t) * pair.v_even(t)
    oo = pair.u_odd(t) * pair.v_odd(t)
    assert abs(ee - oo - 1) <= 1e-14 * scale
    x, y = pair.u(t) * pair.v(-t), pair.u(-t) * pair.v(t)
    assert abs(x + y - 2) <= 1e-14 * scale


@given(coef, coef, times)
def test_even_parts_coincide(a, b, t):
    pair = homogeneous_pair((a, b))
    assert pair.u_even(t) == pair.v_even(t)
    assert pair.u_even(t) == pytest.approx((pair.u(t) + pair.u(-t)) / 2, rel=1e-12, abs=1e-12)
    assert pair.u_odd(t) == pytest.approx((pair.u(t) - pair.u(-t)) / 2, rel=1e-9, abs=1e-9 * (1 + abs(pair.u(t))))


def test_odd_parts_proportional():
    # u~_o = k v~_o with k = (a+b)/(b-a) when a != b
    a, b = 2.0, -0.5
    pair = homogeneous_pair((a, b))
    t = np.linspace(-2, 2, 11)
    np.testing.assert_allclose(pair.u_odd(t), (a + b) / (b - a) * pair.v_odd(t), atol=1e-14)


def test_near_c3_matches_limit():
    pair = homogeneous_pair((1 + 1e-8, 1.0))
    t = np.linspace(-2, 2, 101)
    assert pair.case.tag == C1
    assert np.max(np.abs(pair.u(t) - (1 - 2 * t))) <= 1e-6


@pytest.mark.parametrize(
    "f, t, expected",
    [(lambda x: x, 3.0, (0.0, 3.0)), (math.cos, 0.7, (math.cos(0.7), 0.0)), (math.exp, 1.0, (math.cosh(1), math.sinh(1)))],
)
def test_even_odd_examples(f, t, expected):
    even, odd = even_odd(f, t)
    assert even == pytest.approx(expected[0], abs=1e-15)
    assert odd == pytest.approx(expected[1], abs=1e-15)
    assert even + odd == pytest.approx(f(t), rel=1e-15)


def test_negated_coefficients():
    assert Coefficients(1.5, -2).negated() == Coefficients(-1.5, 2)
