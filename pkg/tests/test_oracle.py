import math
import warnings

import numpy as np
import pytest

from reflectode import NonuniqueProblemError, ProblemSpec, collocation_solve, parse_forcing, residual, shooting_solve, solve
from reflectode.oracle import BreakpointProximityWarning, compare


def forcing(text):
    return parse_forcing(text).to_forcing()


def bump_problem():
    return ProblemSpec((1, 1), 0.0, 0.0, forcing("bump(1)"))


def smooth_problem():
    return ProblemSpec((-2, 1), 0.3, 0.5, forcing("cos(t) + t"))


@pytest.mark.parametrize("method", ["shooting", "collocation"])
def test_zero_forcing_zero_data_gives_zero(method):
    problem = ProblemSpec((-5, 4), 0.2, 0.0, forcing("0"))
    grid = shooting_solve(problem, 2.0, 1e-2) if method == "shooting" else collocation_solve(problem, 2.0, 201)
    assert np.max(np.abs(grid.u)) == 0.0


@pytest.mark.parametrize("method", ["shooting", "collocation"])
def test_constant_solution(method):
    problem = ProblemSpec((1, -1), 0.0, 5.0, forcing("0"))
    grid = shooting_solve(problem, 2.0, 1e-2) if method == "shooting" else collocation_solve(problem, 2.0, 201)
    np.testing.assert_allclose(grid.u, 5.0, rtol=0, atol=1e-12)


def test_shooting_bump_zero_crossing():
    grid = shooting_solve(bump_problem(), 3.0, 1e-3)
    assert grid.at(1.5) == pytest.approx(0.0, abs=1e-6)


def test_collocation_bump_zero_crossing():
    grid = collocation_solve(bump_problem(), 3.0, 2001)
    assert grid.at(1.5) == pytest.approx(0.0, abs=1e-3)
    assert grid.info["condition_1norm_estimate"] > 1


def test_shooting_oscillatory_closed_form():
    grid = shooting_solve(ProblemSpec((-5, 4), 0.0, 0.0, forcing("cos(3*t)^2")), 2.0, 1e-3)
    t = grid.t
    exact = (6 * np.cos(3 * t) + 3 * np.cos(6 * t) + 2 * np.sin(3 * t) + 2 * np.sin(6 * t) - 9) / 18
    assert np.max(np.abs(grid.u - exact)) <= 1e-6


def _observed_order(errors, ratio=2.0):
    return [math.log(e1 / e2, ratio) for e1, e2 in zip(errors, errors[1:])]


def test_shooting_converges_at_fourth_order():
    problem = smooth_problem()
    exact = solve(problem)
    points = np.array([-1.7, -0.4, 1.1, 2.0])
    errors = [np.max(np.abs(shooting_solve(problem, 2.0, step).at(points) - exact(points)))
              for step in (0.1, 0.05, 0.025)]
    assert all(3.5 < p < 4.5 for p in _observed_order(errors)), errors


def test_collocation_converges_at_second_order():
    problem = ProblemSpec((-2, 1), 0.0, 0.5, forcing("cos(t) + t"))
    exact = solve(problem)
    points = np.array([-1.5, -0.5, 1.0, 2.0])
    errors = [np.max(np.abs(collocation_solve(problem, 2.0, n).at(points) - exact(points))) for n in (201, 401, 801)]
    assert all(1.7 < p < 2.3 for p in _observed_order(errors)), errors


def test_oracles_agree():
    problem = smooth_problem()
    shot = shooting_solve(problem, 2.0, 1e-3)
    coll = collocation_solve(problem, 2.0, 4001)
    assert np.max(np.abs(coll.at(shot.t) - shot.u)) <= 1e-5


@pytest.mark.parametrize("coeffs, t0", [((1, 1), 0.5), ((1, -1), 0.0)])
def test_oracles_share_solver_verdict(coeffs, t0):
    problem = ProblemSpec(coeffs, t0, 1.0, forcing("cos(t)"))
    degenerate = coeffs == (1, 1)
    for run in (lambda: shooting_solve(problem, 2.0, 1e-3), lambda: collocation_solve(problem, 2.0, 401)):
        if degenerate:
            with pytest.raises(NonuniqueProblemError):
                run()
        else:
            run()


def test_residual_of_exact_sinh():
    problem = ProblemSpec((1, 2), 1.0, math.sinh(1.0), forcing("exp(t)"))
    for t in (-1.5, -0.3, 0.8, 2.0):
        assert abs(residual(np.sinh, problem, t, 1e-5)) <= 1e-8


def test_residual_of_constant_solution_is_rounding():
    problem = ProblemSpec((2, 3), 0.0, 1.5, forcing("7.5"))
    assert abs(residual(lambda t: np.full_like(np.asarray(t, float), 1.5), problem, 0.4)) <= 1e-12


def test_residual_warns_near_breakpoint():
    with pytest.warns(BreakpointProximityWarning):
        residual(lambda t: t, bump_problem(), 1.0 + 1e-6)
    with pytest.warns(BreakpointProximityWarning):
        residual(lambda t: t, bump_problem(), -1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        residual(lambda t: t, bump_problem(), 0.5)


def test_compare_reports_gap_and_residual():
    problem = smooth_problem()
    result = compare(problem, shooting_solve(problem, 2.0, 1e-3), solve(problem), every=100)
    assert result.sup_error <= 1e-8
    assert result.residual_sup <= 1e-4
    assert set(result.to_dict()) >= {"sup_error", "residual_sup"}


def test_large_solution_gap_closes_under_step_refinement():
    # fast-growing solution (|u| ~ 1e6 on [-3, 3]) where step 1e-3 leaves an absolute gap above 1e-5
    problem = ProblemSpec((0.1215, 4.8807), 0.69, 1.0, forcing("-0.443*t^2 + 1.26*cos(1.461*t)"))
    exact = solve(problem)(-3.0)
    gaps = [abs(shooting_solve(problem, 3.0, step).at(-3.0) - exact) for step in (4e-3, 2e-3, 1e-3)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] / abs(exact) <= 1e-9
