import math

import numpy as np
import pytest

from reflectode import (AuxPair, Forcing, HypothesisViolatedError, InvalidInputError, NonuniqueProblemError, NthProblem, ProblemSpec,
                        construct, parse_forcing, solve, verify_aux)
from reflectode.nthorder import decomposition_residual, parity_residuals


def forcing(text):
    return parse_forcing(text).to_forcing()


def exp_pair():
    """``e^-t`` for both functions, with derivatives up to order 2."""
    e = lambda t: np.exp(-np.asarray(t, float))
    return AuxPair((e, lambda t: -e(t), e), (e, lambda t: -e(t), e), det=lambda t: np.ones_like(np.asarray(t, float)))


def double_root_problem(text="cos(t)", t0=0.4, c=1.0):
    """``w'' + 2 w' + w = h``; ``e^-t`` solves the homogeneous equation."""
    return NthProblem((0, 0, 0), (1, 2, 1), forcing(text), t0, c)


@pytest.mark.parametrize("a, b", [(-5, 4), (1, 2), (2, -3), (1, 1), (1, -1), (0, 0.5)])
def test_first_order_pair_passes(a, b):
    report = verify_aux(NthProblem.first_order(a, b, forcing("1")), AuxPair.first_order(a, b))
    assert report.passed
    assert max(report.u_relative + report.v_relative) <= 1e-12
    assert report.min_determinant == pytest.approx(1.0)


def test_constant_pair_fails_first_order_identities():
    one = lambda t: np.ones_like(np.asarray(t, float))
    zero = lambda t: np.zeros_like(np.asarray(t, float))
    report = verify_aux(NthProblem.first_order(1, 1, forcing("1")), AuxPair((one, zero), (one, zero)), samples=5)
    assert not report.passed
    assert report.u_residuals[0] == pytest.approx(2.0)
    assert report.failures()


def test_double_root_pair_passes():
    report = verify_aux(double_root_problem(), exp_pair())
    assert report.passed, report.failures()


def test_generic_second_order_basis_fails():
    # roots -1 and -2 of r^2 + 3 r + 2: the identities need more than the ODE itself
    u = (lambda t: np.exp(-t), lambda t: -np.exp(-t), lambda t: np.exp(-t))
    v = (lambda t: np.exp(-2 * t), lambda t: -2 * np.exp(-2 * t), lambda t: 4 * np.exp(-2 * t))
    report = verify_aux(NthProblem((0, 0, 0), (2, 3, 1), forcing("1")), AuxPair(u, v))
    assert not report.passed


def test_too_few_derivatives_rejected():
    e = lambda t: np.exp(-t)
    with pytest.raises(InvalidInputError):
        verify_aux(double_root_problem(), AuxPair((e,), (e,)))


@pytest.mark.parametrize("bad", [dict(a=(0, 1), b=(1, 1)), dict(a=(0, 0), b=(1, 2)), dict(a=(0,), b=(1,))])
def test_leading_coefficients_enforced(bad):
    with pytest.raises(InvalidInputError):
        NthProblem(bad["a"], bad["b"], forcing("1"))


def test_zero_forcing_gives_zero():
    sol = construct(NthProblem.first_order(-5, 4, forcing("0"), 0.3, 0.0), AuxPair.first_order(-5, 4))
    np.testing.assert_array_equal(sol(np.linspace(-2, 2, 5)), 0.0)


def test_no_reflection_matches_integrating_factor():
    problem = NthProblem.first_order(0, 1, forcing("exp(t)"), 0.0, 0.0)
    sol = construct(problem, AuxPair((exp_pair().u[0], exp_pair().u[1]), (exp_pair().v[0], exp_pair().v[1])))
    for t in (-1.5, 0.0, 0.7, 2.0):
        assert sol.ubar(t) == pytest.approx(math.sinh(t), abs=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_first_order_reduction_matches_solver(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(-4, 4, 2)
    t0, c = rng.uniform(-1, 1), rng.uniform(-2, 2)
    h = forcing(f"{rng.uniform(-2, 2):.3f}*cos(t) + t^2")
    try:
        expected = solve(ProblemSpec((a, b), t0, c, h))
    except NonuniqueProblemError:
        pytest.skip("degenerate draw")
    sol = construct(NthProblem.first_order(a, b, h, t0, c), AuxPair.first_order(a, b))
    ts = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(sol(ts), expected(ts), atol=2e-10 * (1 + np.max(np.abs(expected(ts)))))


def test_parity_and_decomposition():
    problem = NthProblem.first_order(2, 1, forcing("exp(t) + sin(3*t)"))
    pair = AuxPair.first_order(2, 1)
    ts = np.linspace(0.1, 2, 20)
    odd, even = parity_residuals(problem, pair, ts)
    assert odd <= 1e-9 and even <= 1e-9
    assert decomposition_residual(problem, pair, np.linspace(-2, 2, 41)) <= 1e-9


@pytest.mark.parametrize("hypothesis", ["h1", "h2", "h3"])
def test_second_order_solution_under_each_hypothesis(hypothesis):
    problem = double_root_problem()
    sol = construct(problem, exp_pair(), hypothesis)
    assert sol(problem.t0) == pytest.approx(problem.c, abs=1e-10)
    assert sol.ubar(0.0) == 0.0
    assert np.max(np.abs(sol.operator_residual(np.linspace(-2, 2, 9)))) <= 1e-8


def test_unknown_hypothesis_rejected():
    with pytest.raises(InvalidInputError):
        construct(double_root_problem(), exp_pair(), "h4")


def test_h1_rejects_vanishing_initial_value():
    pair = AuxPair.first_order(1, 1)
    with pytest.raises(HypothesisViolatedError) as info:
        construct(NthProblem.first_order(1, 1, forcing("1"), 0.5, 0.0), pair, "h1")
    assert info.value.check == "h1_initial_value"


def test_h3_rejects_zero_coefficient_sum():
    with pytest.raises(HypothesisViolatedError) as info:
        construct(NthProblem.first_order(1, -1, forcing("1"), 0.3, 0.0), AuxPair.first_order(1, -1), "h3")
    assert info.value.check == "h3_coefficient_sum"


def test_rejected_pair_names_identity_check():
    one = lambda t: np.ones_like(np.asarray(t, float))
    zero = lambda t: np.zeros_like(np.asarray(t, float))
    with pytest.raises(HypothesisViolatedError) as info:
        construct(NthProblem.first_order(1, 1, forcing("1")), AuxPair((one, zero), (one, zero)))
    assert info.value.check == "aux_identities"


def test_constant_forcing_object_accepted():
    problem = NthProblem.first_order(1, 2, Forcing.constant(3.0), 0.0, 1.0)
    sol = construct(problem, AuxPair.first_order(1, 2))
    assert np.max(np.abs(sol.operator_residual(np.linspace(-1, 1, 5)))) <= 1e-8
