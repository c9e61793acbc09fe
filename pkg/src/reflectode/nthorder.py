"""Constructive solutions of the n-th order equation with reflection

    L u = sum_{k=0}^{n} [a_k u^(k)(-t) + b_k u^(k)(t)] = h(t),   u(t0) = c,

with ``a_n = 0`` and ``b_n = 1``, given an auxiliary pair ``u~, v~``.

Write ``D = u~_e v~_e - u~_o v~_o`` and split the forcing as ``h = phi u~ + psi v~``
with the odd function ``phi = (h_o v~_e - h_e v~_o) / D`` and the even function
``psi = (h_e u~_e - h_o u~_o) / D``.  Then

    ubar = phi~ u~ + psi~ v~,     f~(t) = 1/(n-1)! int_0^t (t - s)^(n-1) f(s) ds,

satisfies ``L ubar = h`` and ``ubar(0) = 0``, provided ``u~`` and ``v~`` satisfy
the ``2n`` identities checked by :func:`verify_aux`.  The initial condition is
then met by adding a multiple of a solution of ``L w = 0``; which one is
chosen by the caller (hypotheses ``h1``, ``h2``, ``h3``).

Finding an auxiliary pair for ``n >= 2`` is left to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .analysis import uniqueness_threshold
from .core import _as_coefficients, homogeneous_pair
from .errors import HypothesisViolatedError, InvalidInputError
from .quadrature import DEFAULT_TOL, Forcing, integrate

AUX_TOL = 1e-8
H1_RESIDUAL_TOL = 1e-8
H3_COEFF_TOL = 1e-12
H3_CONDITION_TOL = 1e-8
HYPOTHESES = ("h1", "h2", "h3")


@dataclass(frozen=True)
class NthProblem:
    """Coefficients ``a_k``, ``b_k`` for ``k = 0..n`` (``a_n = 0``, ``b_n = 1``), forcing and initial data."""

    a: tuple
    b: tuple
    h: Forcing
    t0: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        b = tuple(float(x) for x in self.b)
        if len(a) != len(b) or len(a) < 2:
            raise InvalidInputError("a and b must both list coefficients for orders 0..n with n >= 1")
        if not all(math.isfinite(x) for x in a + b):
            raise InvalidInputError("coefficients must be finite")
        if a[-1] != 0.0 or b[-1] != 1.0:
            raise InvalidInputError(f"leading coefficients must be a_n = 0 and b_n = 1, got {a[-1]!r}, {b[-1]!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not isinstance(self.h, Forcing):
            object.__setattr__(self, "h", Forcing(self.h))
        for name in ("t0", "c"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidInputError(f"{name} must be finite")
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return len(self.a) - 1

    @classmethod
    def first_order(cls, a: float, b: float, h, t0: float = 0.0, c: float = 0.0) -> "NthProblem":
        return cls((a, 0.0), (b, 1.0), h, t0, c)

    def apply(self, derivs: Sequence[Callable], t):
        """``L`` applied to a function given by its derivatives ``[f, f', ..., f^(n)]``."""
        t = np.asarray(t, float)
        total = np.zeros_like(t)
        for k in range(self.n + 1):
            if self.a[k]:
                total = total + self.a[k] * np.asarray(derivs[k](-t), float)
            if self.b[k]:
                total = total + self.b[k] * np.asarray(derivs[k](t), float)
        return total


@dataclass(frozen=True)
class AuxPair:
    """Derivative lists ``[u~, u~', ...]`` and ``[v~, v~', ...]``; callables must accept arrays.

    ``det`` optionally gives ``u~_e v~_e - u~_o v~_o`` in closed form.  When the
    pair grows exponentially the product form loses all accuracy, so a known
    closed form should be supplied.
    """

    u: tuple
    v: tuple
    det: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(self.u))
        object.__setattr__(self, "v", tuple(self.v))
        if not self.u or not self.v:
            raise InvalidInputError("auxiliary pair needs at least the functions themselves")

    @property
    def order(self) -> int:
        """Highest derivative available for both functions."""
        return min(len(self.u), len(self.v)) - 1

    @classmethod
    def first_order(cls, a: float, b: float) -> "AuxPair":
        """The normalized homogeneous pair of ``u' + a u(-t) + b u(t) = 0``."""
        pair = homogeneous_pair(_as_coefficients((a, b)))
        return cls((pair.u, pair.du), (pair.v, pair.dv), det=lambda t: np.ones_like(np.asarray(t, float)))

    def determinant(self, t):
        """``u~_e v~_e - u~_o v~_o`` at ``t``."""
        t = np.asarray(t, float)
        if self.det is not None:
            return np.asarray(self.det(t), float)
        u_p, u_m = np.asarray(self.u[0](t), float), np.asarray(self.u[0](-t), float)
        v_p, v_m = np.asarray(self.v[0](t), float), np.asarray(self.v[0](-t), float)
        return 0.25 * ((u_p + u_m) * (v_p + v_m) - (u_p - u_m) * (v_p - v_m))


@dataclass(frozen=True)
class AuxReport:
    u_residuals: tuple
    v_residuals: tuple
    min_determinant: float
    passed: bool
    u_relative: tuple = ()
    v_relative: tuple = ()

    def failures(self) -> list:
        out = [f"u~ identity j={j}: residual {r:.3e}" for j, (r, rel) in
               enumerate(zip(self.u_residuals, self.u_relative)) if not rel <= AUX_TOL]
        out += [f"v~ identity j={j}: residual {r:.3e}" for j, (r, rel) in
                enumerate(zip(self.v_residuals, self.v_relative)) if not rel <= AUX_TOL]
        if not self.min_determinant >= AUX_TOL:
            out.append(f"min |u~_e v~_e - u~_o v~_o| = {self.min_determinant:.3e}")
        return out

    def to_dict(self) -> dict:
        return {"u_residuals": list(self.u_residuals), "v_residuals": list(self.v_residuals),
                "u_relative": list(self.u_relative), "v_relative": list(self.v_relative),
                "min_determinant": self.min_determinant, "pass": self.passed}


def _identity_terms(problem: NthProblem, derivs, t, j: int, parity_shift: int):
    """Value of identity ``j`` and the sum of the magnitudes of its terms."""
    n = problem.n
    total = np.zeros_like(t)
    size = np.zeros_like(t)
    for i in range(n - j + 1):
        k = i + j
        weight = math.comb(k, j)
        sign = (-1) ** (n + i + parity_shift)
        if problem.a[k]:
            term = weight * sign * problem.a[k] * np.asarray(derivs[i](-t), float)
            total, size = total + term, size + np.abs(term)
        if problem.b[k]:
            term = weight * problem.b[k] * np.asarray(derivs[i](t), float)
            total, size = total + term, size + np.abs(term)
    return total, size


def _residual(total, size) -> tuple:
    """Largest raw residual and largest residual relative to ``1 + |terms|``."""
    return float(np.max(np.abs(total))), float(np.max(np.abs(total) / (1.0 + size)))


def verify_aux(problem: NthProblem, pair: AuxPair, window=(-2.0, 2.0), samples: int = 201) -> AuxReport:
    """Check the identities an auxiliary pair must satisfy on a sample grid.

    For ``j = 0..n-1``::

        sum_{i=0}^{n-j} C(i+j, j) [(-1)^(n+i-1) a_{i+j} u~^(i)(-t) + b_{i+j} u~^(i)(t)] = 0
        sum_{i=0}^{n-j} C(i+j, j) [(-1)^(n+i)   a_{i+j} v~^(i)(-t) + b_{i+j} v~^(i)(t)] = 0

    and ``u~_e v~_e - u~_o v~_o`` must stay away from zero.  The report
    passes when every residual, measured relative to ``1 + sum |terms|`` so
    exponentially large pairs are judged at their own precision, is at most
    ``1e-8`` and the smallest determinant is at least ``1e-8``.
    """
    if int(samples) != samples or samples < 2:
        raise InvalidInputError("samples must be an integer >= 2")
    n = problem.n
    if pair.order < n:
        raise InvalidInputError(f"auxiliary pair provides derivatives up to order {pair.order}, need {n}")
    lo, hi = (float(x) for x in window)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
        raise InvalidInputError("window must be a finite interval lo <= hi")
    t = np.linspace(lo, hi, int(samples))
    u_res = [_residual(*_identity_terms(problem, pair.u, t, j, -1)) for j in range(n)]
    v_res = [_residual(*_identity_terms(problem, pair.v, t, j, 0)) for j in range(n)]
    min_det = float(np.min(np.abs(pair.determinant(t))))
    passed = all(rel <= AUX_TOL for _, rel in u_res + v_res) and min_det >= AUX_TOL
    return AuxReport(tuple(r for r, _ in u_res), tuple(r for r, _ in v_res), min_det, passed,
                     tuple(r for _, r in u_res), tuple(r for _, r in v_res))


def _split_forcing(h: Forcing, pair: AuxPair):
    """``phi`` (odd) and ``psi`` (even) with ``h = phi u~ + psi v~``."""
    hf = h.func
    uf, vf = pair.u[0], pair.v[0]

    def parts(s):
        s = np.asarray(s, float)
        hp, hm = np.asarray(hf(s), float), np.asarray(hf(-s), float)
        up, um = np.asarray(uf(s), float), np.asarray(uf(-s), float)
        vp, vm = np.asarray(vf(s), float), np.asarray(vf(-s), float)
        h_e, h_o = 0.5 * (hp + hm), 0.5 * (hp - hm)
        u_e, u_o = 0.5 * (up + um), 0.5 * (up - um)
        v_e, v_o = 0.5 * (vp + vm), 0.5 * (vp - vm)
        det = pair.determinant(s)
        return (h_o * v_e - h_e * v_o) / det, (h_e * u_e - h_o * u_o) / det

    return (lambda s: parts(s)[0]), (lambda s: parts(s)[1]), parts


def _symmetric(points) -> list:
    return sorted({float(p) for p in points} | {-float(p) for p in points})


@dataclass(frozen=True)
class NthSolution:
    """``w = ubar + lam * base`` where ``L base = 0`` and ``ubar(0) = 0``.

    ``derivative(t, k)`` evaluates ``w^(k)`` for ``k <= n`` from the
    derivatives of the auxiliary pair and of ``phi~``, ``psi~``.
    """

    problem: NthProblem
    pair: AuxPair = field(repr=False)
    hypothesis: str
    lam: float
    ubar_t0: float
    tol: float = DEFAULT_TOL
    base_offset: float = 0.0
    base_source: "NthSolution | None" = field(default=None, repr=False)

    @property
    def lambda_(self) -> float:
        return self.lam

    def _tilde_derivative(self, parts, t: float, j: int) -> tuple:
        """``(phi~^(j)(t), psi~^(j)(t))`` for ``0 <= j <= n``."""
        n = self.problem.n
        if j == n:
            phi, psi = parts(np.array([t]))
            return float(phi[0]), float(psi[0])
        if t == 0.0:
            return 0.0, 0.0
        m = n - 1 - j
        scale = 1.0 / math.factorial(m)
        h = self.problem.h
        bps = _symmetric(h.breakpoints)
        sps = _symmetric(h.singular_points)
        phi_t = integrate(lambda s: scale * (t - s) ** m * parts(s)[0], 0.0, t, bps, sps, tol=self.tol)
        psi_t = integrate(lambda s: scale * (t - s) ** m * parts(s)[1], 0.0, t, bps, sps, tol=self.tol)
        return phi_t, psi_t

    def ubar_derivative(self, t: float, k: int = 0) -> float:
        t = float(t)
        if k < 0 or k > self.problem.n or k > self.pair.order:
            raise InvalidInputError(f"derivative order {k} not available")
        _, _, parts = _split_forcing(self.problem.h, self.pair)
        if k == 0:
            return _ubar_value(self.problem, self.pair, t, self.tol, parts)
        total = 0.0
        for j in range(k + 1):
            phi_j, psi_j = self._tilde_derivative(parts, t, j)
            weight = math.comb(k, j)
            total += weight * (phi_j * float(self.pair.u[k - j](t)) + psi_j * float(self.pair.v[k - j](t)))
        return total

    def base_derivative(self, t: float, k: int = 0) -> float:
        t = float(t)
        if self.hypothesis == "h1":
            return float(self.pair.u[k](t))
        if self.hypothesis == "h2":
            return float(self.pair.v[k](t))
        value = self.base_source.ubar_derivative(t, k)
        return value + (self.base_offset if k == 0 else 0.0)

    def derivative(self, t, k: int = 0):
        def one(x):
            return self.ubar_derivative(x, k) + self.lam * self.base_derivative(x, k)

        if np.ndim(t) == 0:
            return one(float(t))
        t = np.asarray(t, float)
        return np.array([one(float(x)) for x in t.ravel()]).reshape(t.shape)

    def ubar(self, t):
        return self._vector(lambda x: self.ubar_derivative(x, 0), t)

    def u(self, t):
        return self.derivative(t, 0)

    __call__ = u

    @staticmethod
    def _vector(f, t):
        if np.ndim(t) == 0:
            return f(float(t))
        t = np.asarray(t, float)
        return np.array([f(float(x)) for x in t.ravel()]).reshape(t.shape)

    def operator_residual(self, t):
        """``L w - h`` at ``t`` using exact derivative evaluations."""
        derivs = [lambda x, k=k: self.derivative(x, k) for k in range(self.problem.n + 1)]
        t = np.asarray(t, float)
        return self.problem.apply(derivs, t) - np.asarray(self.problem.h.func(t), float)


def _ubar_value(problem: NthProblem, pair: AuxPair, t: float, tol: float, parts) -> float:
    """``phi~(t) u~(t) + psi~(t) v~(t)`` as one integral."""
    if t == 0.0:
        return 0.0
    n = problem.n
    scale = 1.0 / math.factorial(n - 1)
    ut = float(pair.u[0](t))
    vt = float(pair.v[0](t))

    def integrand(s):
        phi, psi = parts(s)
        return scale * (t - s) ** (n - 1) * (phi * ut + psi * vt)

    h = problem.h
    return integrate(integrand, 0.0, t, _symmetric(h.breakpoints), _symmetric(h.singular_points), tol=tol)


def parity_residuals(problem: NthProblem, pair: AuxPair, t) -> tuple:
    """Largest ``|phi(t) + phi(-t)|`` and ``|psi(t) - psi(-t)|`` on the samples ``t``."""
    phi, psi, _ = _split_forcing(problem.h, pair)
    t = np.asarray(t, float)
    return float(np.max(np.abs(phi(t) + phi(-t)))), float(np.max(np.abs(psi(t) - psi(-t))))


def decomposition_residual(problem: NthProblem, pair: AuxPair, t) -> float:
    """Largest ``|phi u~ + psi v~ - h|`` on the samples ``t``."""
    _, _, parts = _split_forcing(problem.h, pair)
    t = np.asarray(t, float)
    phi, psi = parts(t)
    recon = phi * np.asarray(pair.u[0](t), float) + psi * np.asarray(pair.v[0](t), float)
    return float(np.max(np.abs(recon - np.asarray(problem.h.func(t), float))))


def _operator_relative_residual(problem: NthProblem, derivs, t) -> float:
    """``max |L f| / (1 + sum |terms|)`` on the samples ``t``."""
    total = problem.apply(derivs, t)
    size = np.zeros_like(t)
    for k in range(problem.n + 1):
        size = size + abs(problem.a[k]) * np.abs(np.asarray(derivs[k](-t), float))
        size = size + abs(problem.b[k]) * np.abs(np.asarray(derivs[k](t), float))
    return float(np.max(np.abs(total) / (1.0 + size)))


def _default_window(t0: float) -> tuple:
    span = max(2.0, 1.5 * abs(t0))
    return (-span, span)


def construct(problem: NthProblem, pair: AuxPair, hypothesis: str = "h1", tol: float = DEFAULT_TOL,
              window=None, samples: int = 201) -> NthSolution:
    """Solve ``L w = h``, ``w(t0) = c`` from an auxiliary pair.

    Parameters
    ----------
    hypothesis : {"h1", "h2", "h3"}
        How the initial condition is met. ``h1`` adds a multiple of ``u~``
        and needs ``L u~ = 0`` and ``u~(t0) != 0``; ``h2`` does the same with
        ``v~``.  ``h3`` builds ``w1`` with ``L w1 = 1``, ``w1(0) = 0`` and uses
        ``w2 = w1 - 1/(a_0 + b_0)``; it needs ``a_0 + b_0 != 0`` and
        ``w2(t0) != 0``.
    window : (lo, hi), optional
        Sample interval for the numerical hypothesis checks.

    Raises
    ------
    HypothesisViolatedError
        Naming the first check that failed.
    """
    if hypothesis not in HYPOTHESES:
        raise InvalidInputError(f"hypothesis must be one of {HYPOTHESES}, got {hypothesis!r}")
    window = _default_window(problem.t0) if window is None else window
    report = verify_aux(problem, pair, window, samples)
    if not report.passed:
        raise HypothesisViolatedError("auxiliary pair rejected: " + "; ".join(report.failures()), "aux_identities")
    t0 = problem.t0
    grid = np.linspace(float(window[0]), float(window[1]), int(samples))
    _, _, parts = _split_forcing(problem.h, pair)
    ubar_t0 = _ubar_value(problem, pair, t0, tol, parts)
    threshold = uniqueness_threshold(t0)

    if hypothesis in ("h1", "h2"):
        derivs = pair.u if hypothesis == "h1" else pair.v
        name = "u~" if hypothesis == "h1" else "v~"
        resid = _operator_relative_residual(problem, derivs, grid)
        if not resid <= H1_RESIDUAL_TOL:
            raise HypothesisViolatedError(f"{hypothesis}: L {name} relative residual {resid:.3e} exceeds {H1_RESIDUAL_TOL}",
                                          f"{hypothesis}_homogeneous")
        base_t0 = float(derivs[0](t0))
        if not abs(base_t0) > threshold:
            raise HypothesisViolatedError(f"{hypothesis}: {name}(t0) = {base_t0:.3e} vanishes",
                                          f"{hypothesis}_initial_value")
        lam = (problem.c - ubar_t0) / base_t0
        return NthSolution(problem, pair, hypothesis, lam, ubar_t0, tol)

    s = problem.a[0] + problem.b[0]
    if not abs(s) > H3_COEFF_TOL:
        raise HypothesisViolatedError(f"h3: a_0 + b_0 = {s:.3e} vanishes", "h3_coefficient_sum")
    unit = NthProblem(problem.a, problem.b, Forcing.constant(1.0), 0.0, 0.0)
    w1 = NthSolution(unit, pair, "h1", 0.0, 0.0, tol)
    w1_t0 = w1.ubar_derivative(t0, 0)
    condition = s * w1_t0
    if not abs(condition - 1.0) > H3_CONDITION_TOL:
        raise HypothesisViolatedError(f"h3: (a_0 + b_0) w1(t0) = {condition!r} is 1, so w2(t0) vanishes",
                                      "h3_integral_condition")
    w2_t0 = w1_t0 - 1.0 / s
    lam = (problem.c - ubar_t0) / w2_t0
    return NthSolution(problem, pair, "h3", lam, ubar_t0, tol, base_offset=-1.0 / s, base_source=w1)
