"""Brute-force reference solvers that share no code with the Green's-function path.

Shooting: for ``t >= 0`` put ``x(t) = u(t)`` and ``y(t) = u(-t)``.  Then

    x' = h(t) - a y - b x
    y' = -u'(-t) = -h(-t) + a x + b y,       x(0) = y(0) = u(0),

an ordinary 2x2 linear system.  One run from ``u(0) = 0`` with forcing and
one homogeneous run from ``u(0) = 1`` are combined to hit ``u(t0) = c``.

Collocation: central differences on a symmetric grid, where node ``j`` is
coupled to node ``-j`` by the reflection term, closed with one-sided
second-order differences at both ends.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .analysis import degenerate_t0, uniqueness_threshold
from .errors import InvalidInputError, NonuniqueProblemError
from .solver import ProblemSpec


class BreakpointProximityWarning(UserWarning):
    """A finite-difference stencil straddles a point where ``h`` is not smooth."""


@dataclass(frozen=True)
class GridSolution:
    t: np.ndarray
    u: np.ndarray
    info: dict = field(default_factory=dict)

    def at(self, t):
        """Linear interpolation; exact on grid nodes."""
        return np.interp(t, self.t, self.u)


@dataclass(frozen=True)
class OracleResult:
    grid: np.ndarray
    oracle_u: np.ndarray
    candidate_u: np.ndarray
    sup_error: float
    residual_sup: float

    def to_dict(self) -> dict:
        return {"sup_error": self.sup_error, "residual_sup": self.residual_sup, "points": int(self.grid.size)}


def _nonunique(problem: ProblemSpec, value: float, method: str):
    deg = degenerate_t0(problem.a, problem.b)
    return NonuniqueProblemError(
        f"{method}: homogeneous solution at t0={problem.t0} is {value:.3e}; t0 is degenerate "
        f"(degenerate set {deg.describe()})", deg)


def _rk4_maps(a: float, b: float, h: float):
    """One RK4 step for ``z' = M z + F(t)`` written as ``z+ = R z + P0 F0 + Pm Fm + P1 F1``."""
    M = np.array([[-b, -a], [a, b]])
    A = h * M
    I = np.eye(2)
    A2 = A @ A
    A3 = A2 @ A
    R = I + A + A2 / 2 + A3 / 6 + A2 @ A2 / 24
    P0 = h / 6 * (I + A + A2 / 2 + A3 / 4)
    Pm = h / 6 * (4 * I + 2 * A + A2 / 2)
    P1 = h / 6 * I
    return R, P0, Pm, P1


def shooting_solve(problem: ProblemSpec, T: float, step: float) -> GridSolution:
    """Fixed-step RK4 solution on ``[-T, T]``.

    The grid is ``k * dt`` with ``dt = T / ceil(T / step)``.  Integration
    also stops exactly at ``|t0|`` and at every ``|p|`` for breakpoints and
    singular points ``p`` of ``h``, and the forcing is sampled one ulp inside
    each such segment so jumps contribute their one-sided values.
    """
    T = float(T)
    step = float(step)
    if not (T > 0 and step > 0 and math.isfinite(T) and math.isfinite(step)):
        raise InvalidInputError("T and step must be positive and finite")
    if abs(problem.t0) > T:
        raise InvalidInputError(f"|t0| = {abs(problem.t0)} exceeds T = {T}")
    a, b = problem.a, problem.b
    h = problem.h.func
    n = int(math.ceil(T / step - 1e-9))
    dt = T / n
    grid = np.arange(n + 1) * dt
    grid[-1] = T
    stops = {0.0, T, abs(problem.t0)} | {abs(p) for p in problem.h.special_points if abs(p) < T}
    stops = sorted(stops)

    # state columns: particular run from 0, homogeneous run from 1
    xp = yp = 0.0
    xh = yh = 1.0
    times = [0.0]
    states = [(0.0, 0.0, 1.0, 1.0)]
    maps = {}
    for lo, hi in zip(stops[:-1], stops[1:]):
        inner = grid[(grid > lo) & (grid < hi)]
        knots = np.concatenate([[lo], inner, [hi]])
        # split each knot interval into sub-steps no longer than dt
        pieces = []
        for k0, k1 in zip(knots[:-1], knots[1:]):
            m = max(1, int(math.ceil((k1 - k0) / dt - 1e-9)))
            pieces.append(np.linspace(k0, k1, m + 1)[:-1])
        starts = np.concatenate(pieces)
        ends = np.append(starts[1:], hi)
        hs = ends - starts
        left = np.nextafter(lo, hi)
        right = np.nextafter(hi, lo)
        t0s = np.clip(starts, left, right)
        tms = np.clip(starts + hs / 2, left, right)
        t1s = np.clip(ends, left, right)
        with np.errstate(all="ignore"):
            F = [np.stack([np.asarray(h(tt), float) * np.ones_like(tt), -np.asarray(h(-tt), float) * np.ones_like(tt)])
                 for tt in (t0s, tms, t1s)]
        if not all(np.all(np.isfinite(f)) for f in F):
            raise InvalidInputError("forcing is not finite on the shooting grid")
        for i in range(starts.size):
            key = round(hs[i] / dt, 12)
            if key not in maps:
                maps[key] = _rk4_maps(a, b, hs[i])
            R, P0, Pm, P1 = maps[key]
            q = P0 @ F[0][:, i] + Pm @ F[1][:, i] + P1 @ F[2][:, i]
            xp, yp = (R[0, 0] * xp + R[0, 1] * yp + q[0], R[1, 0] * xp + R[1, 1] * yp + q[1])
            xh, yh = (R[0, 0] * xh + R[0, 1] * yh, R[1, 0] * xh + R[1, 1] * yh)
            times.append(ends[i])
            states.append((xp, yp, xh, yh))
    times = np.array(times)
    states = np.array(states)

    def lookup(tau):
        idx = int(np.argmin(np.abs(times - abs(tau))))
        row = states[idx]
        return (row[0], row[2]) if tau >= 0 else (row[1], row[3])

    part_t0, hom_t0 = lookup(problem.t0)
    if abs(hom_t0) <= uniqueness_threshold(problem.t0):
        raise _nonunique(problem, hom_t0, "shooting")
    lam = (problem.c - part_t0) / hom_t0

    idx = np.searchsorted(times, grid)
    idx = np.clip(idx, 0, times.size - 1)
    pos = states[idx]
    u_pos = pos[:, 0] + lam * pos[:, 2]
    u_neg = pos[:, 1] + lam * pos[:, 3]
    t_out = np.concatenate([-grid[:0:-1], grid])
    u_out = np.concatenate([u_neg[:0:-1], u_pos])
    return GridSolution(t_out, u_out, {"method": "shooting", "step": dt, "homogeneous_t0": hom_t0, "lambda": lam})


def _collocation_matrix(a: float, b: float, N: int, dx: float, j0: int):
    n = 2 * N + 1
    rows, cols, vals = [], [], []

    def put(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(v)

    inv = 1.0 / (2 * dx)
    for j in range(-N, N + 1):
        r = j + N
        if j == j0:
            put(r, r, 1.0)
            continue
        if j == N:
            put(r, r, 3 * inv)
            put(r, r - 1, -4 * inv)
            put(r, r - 2, inv)
        elif j == -N:
            put(r, r, -3 * inv)
            put(r, r + 1, 4 * inv)
            put(r, r + 2, -inv)
        else:
            put(r, r + 1, inv)
            put(r, r - 1, -inv)
        put(r, r, b)
        put(r, -j + N, a)
    return sp.csc_matrix((vals, (rows, cols)), shape=(n, n))


def _collocation_grid(T: float, n_points: int, t0: float):
    N0 = (n_points - 1) // 2
    dx = T / N0
    if t0 != 0.0:
        k = max(1, int(round(abs(t0) / dx)))
        dx = abs(t0) / k
        j0 = int(math.copysign(k, t0))
    else:
        j0 = 0
    N = int(math.ceil(T / dx - 1e-9))
    return N, dx, j0


DETECTION_MIN_INTERVALS = 50


def _homogeneous_at_t0(a: float, b: float, t0: float, dx: float) -> tuple:
    """Discrete ``u~(t0)`` at spacing ``h`` and ``h/2`` on the grid ``[-|t0|, |t0|]``.

    ``u~(t0)`` only involves the equation on ``[-|t0|, |t0|]``, which the
    reflection maps onto itself, so the check runs on that interval.  Using
    the full window instead would let the parasitic mode of the central
    differences amplify closure errors by ``exp(2 w T)`` in the hyperbolic
    regime.  Row 0 is replaced by the normalization ``u(0) = 1``.
    """
    k = max(DETECTION_MIN_INTERVALS, int(round(abs(t0) / dx)))
    values = []
    for m in (k, 2 * k):
        h = abs(t0) / m
        A = _collocation_matrix(a, b, m, h, 0)
        rhs = np.zeros(2 * m + 1)
        rhs[m] = 1.0
        values.append(spla.spsolve(A, rhs)[m + int(math.copysign(m, t0))])
    return values[0], values[1]


def collocation_solve(problem: ProblemSpec, T: float, n_points: int) -> GridSolution:
    """Second-order finite-difference solution on a symmetric grid.

    The spacing is adjusted so ``t0`` is a node, and the equation row at
    ``t0`` is replaced by ``u(t0) = c``.  Uniqueness is judged on the
    discrete ``u~(t0)`` at spacings ``dx`` and ``dx/2``: the problem is
    declared non-unique when the Richardson-extrapolated value is not
    distinguishable from zero at the scheme's own resolution.
    """
    if int(n_points) != n_points or n_points < 11 or n_points % 2 == 0:
        raise InvalidInputError("n_points must be an odd integer >= 11")
    T = float(T)
    if not (T > 0 and math.isfinite(T)):
        raise InvalidInputError("T must be positive and finite")
    if abs(problem.t0) > T:
        raise InvalidInputError(f"|t0| = {abs(problem.t0)} exceeds T = {T}")
    a, b = problem.a, problem.b
    N, dx, j0 = _collocation_grid(T, int(n_points), problem.t0)

    if problem.t0 != 0.0:  # u~(0) = 1
        coarse, fine = _homogeneous_at_t0(a, b, problem.t0, dx)
        extrapolated = (4 * fine - coarse) / 3
        resolution = max(uniqueness_threshold(problem.t0), abs(fine - coarse))
        if abs(extrapolated) <= resolution:
            raise _nonunique(problem, extrapolated, "collocation")
    else:
        extrapolated = 1.0

    A = _collocation_matrix(a, b, N, dx, j0)
    t = np.arange(-N, N + 1) * dx
    with np.errstate(all="ignore"):
        rhs = np.asarray(problem.h.func(t), float) * np.ones_like(t)
    if not np.all(np.isfinite(rhs)):
        raise InvalidInputError("forcing is not finite on the collocation grid")
    rhs[j0 + N] = problem.c
    try:
        lu = spla.splu(A)
    except RuntimeError as exc:
        raise _nonunique(problem, 0.0, "collocation") from exc
    u = lu.solve(rhs)
    inv_op = spla.LinearOperator(A.shape, matvec=lu.solve, rmatvec=lambda x: lu.solve(x, trans="T"),
                                 dtype=float)
    cond = float(spla.onenormest(A) * spla.onenormest(inv_op))
    info = {"method": "collocation", "spacing": dx, "condition_1norm_estimate": cond,
            "homogeneous_t0": float(extrapolated)}
    return GridSolution(t, u, info)


def residual(u: Callable, problem: ProblemSpec, t, fd_step: float = 1e-5):
    """``u'(t) + a u(-t) + b u(t) - h(t)`` with a central difference for ``u'``.

    Warns with :class:`BreakpointProximityWarning` when ``t`` or ``-t`` is
    within ``fd_step`` of a point where ``h`` is not smooth.
    """
    t_arr = np.atleast_1d(np.asarray(t, float))
    special = np.array(problem.h.special_points)
    if special.size:
        near = np.abs(np.concatenate([t_arr, -t_arr])[:, None] - special[None, :]) <= fd_step
        if np.any(near):
            warnings.warn(f"finite-difference stencil of width {fd_step} touches a breakpoint of h",
                          BreakpointProximityWarning, stacklevel=2)
    up = np.asarray(u(t_arr + fd_step), float)
    um = np.asarray(u(t_arr - fd_step), float)
    derivative = (up - um) / (2 * fd_step)
    value = derivative + problem.a * np.asarray(u(-t_arr), float) + problem.b * np.asarray(u(t_arr), float) \
        - np.asarray(problem.h.func(t_arr), float)
    return float(value[0]) if np.ndim(t) == 0 else value


def safe_points(problem: ProblemSpec, lo: float, hi: float, count: int, fd_step: float) -> np.ndarray:
    """``count`` evenly spaced points in ``[lo, hi]`` whose stencils avoid the breakpoints of ``h``."""
    pts = np.linspace(lo, hi, count)
    special = np.array(problem.h.special_points)
    if special.size == 0:
        return pts
    margin = 2 * fd_step
    for _ in range(8):
        dist = np.min(np.abs(np.abs(pts)[:, None] - np.abs(special)[None, :]), axis=1)
        bad = dist <= margin
        if not np.any(bad):
            break
        pts = np.where(bad, pts + 3 * margin, pts)
    return pts


def compare(problem: ProblemSpec, oracle: GridSolution, candidate: Callable, fd_step: float = 1e-5,
            every: int = 1) -> OracleResult:
    """Sup-norm gap between an oracle grid and a candidate evaluator, plus the candidate's residual."""
    grid = oracle.t[::every]
    ref = oracle.u[::every]
    cand = np.asarray(candidate(grid), float)
    pts = safe_points(problem, float(grid[0]) + 2 * fd_step, float(grid[-1]) - 2 * fd_step,
                      min(grid.size, 100), fd_step)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BreakpointProximityWarning)
        res = residual(candidate, problem, pts, fd_step)
    return OracleResult(grid, ref, cand, float(np.max(np.abs(cand - ref))), float(np.max(np.abs(res))))
