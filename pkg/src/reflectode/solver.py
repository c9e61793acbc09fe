"""Solutions of ``u'(t) + a u(-t) + b u(t) = h(t)``, ``u(t0) = c``.

The particular solution vanishing at 0 is

    ubar(t) = integral_0^t [ A(t, s) h(s) + a S(t - s) h(-s) ] ds,

which is the Green's-function integral with the reflected triangle folded
onto ``[0, t]``.  Every other solution differs from it by a multiple of
``u~``, so the initial condition fixes that multiple unless ``u~(t0) = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import analysis
from .analysis import uniqueness_threshold
from .core import C3_MINUS, C3_PLUS, Coefficients, CaseClass, _as_coefficients, classify
from .errors import InvalidInputError, NonuniqueProblemError
from .kernel import GreenKernel
from .quadrature import DEFAULT_TOL, Forcing, integrate

C31_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class ProblemSpec:
    coeffs: Coefficients
    t0: float
    c: float
    h: Forcing

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coefficients(self.coeffs))
        if not isinstance(self.h, Forcing):
            object.__setattr__(self, "h", Forcing(self.h))
        for name in ("t0", "c"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidInputError(f"{name} must be finite")
            object.__setattr__(self, name, value)

    @property
    def a(self) -> float:
        return self.coeffs.a

    @property
    def b(self) -> float:
        return self.coeffs.b

    def with_data(self, t0=None, c=None, h=None) -> "ProblemSpec":
        return ProblemSpec(self.coeffs, self.t0 if t0 is None else t0, self.c if c is None else c,
                           self.h if h is None else h)


def _pointwise(func: Callable, t):
    if np.ndim(t) == 0:
        return float(func(float(t)))
    t = np.asarray(t, dtype=float)
    return np.array([func(float(x)) for x in t.ravel()]).reshape(t.shape)


@dataclass(frozen=True)
class Solution:
    """``u = ubar + lam * utilde`` with ``ubar(0) = 0``.

    Only ``ubar(t0)`` is stored; everything else is evaluated on demand.
    """

    problem: ProblemSpec
    case: CaseClass
    ubar_func: Callable = field(repr=False)
    utilde_func: Callable = field(repr=False)
    lam: float
    ubar_t0: float
    method: str = "green"

    def ubar(self, t):
        return _pointwise(self.ubar_func, t)

    def utilde(self, t):
        return _pointwise(lambda x: float(self.utilde_func(x)), t)

    def u(self, t):
        return _pointwise(lambda x: self.ubar_func(x) + self.lam * float(self.utilde_func(x)), t)

    __call__ = u

    @property
    def lambda_(self) -> float:
        return self.lam


def _symmetric_points(points):
    return sorted({float(p) for p in points} | {-float(p) for p in points})


def ubar(problem: ProblemSpec, t: float, tol: float = DEFAULT_TOL, kernel: GreenKernel | None = None) -> float:
    """Particular solution with ``ubar(0) = 0`` at a single point ``t``."""
    t = float(t)
    if not math.isfinite(t):
        raise InvalidInputError("evaluation point must be finite")
    if t == 0.0:
        return 0.0
    kernel = kernel if kernel is not None else GreenKernel.from_coefficients(problem.coeffs)
    h = problem.h.func
    a = problem.a
    basis = kernel.pair.basis

    def integrand(s):
        with np.errstate(over="ignore", invalid="ignore"):
            return kernel.forward_part(t, s) * h(s) + a * basis.S(t - s) * h(-s)

    return integrate(integrand, 0.0, t, _symmetric_points(problem.h.breakpoints),
                     _symmetric_points(problem.h.singular_points), tol=tol)


def _reject_degenerate(problem: ProblemSpec, utilde_t0: float, threshold: float):
    if abs(utilde_t0) <= threshold:
        deg = analysis.degenerate_t0(problem.a, problem.b)
        raise NonuniqueProblemError(
            f"u~({problem.t0}) = {utilde_t0:.3e}: t0 lies in the degenerate set {deg.describe()}; "
            "solutions differ by multiples of u~", deg)


def solve(problem: ProblemSpec, tol: float = DEFAULT_TOL) -> Solution:
    """Unique solution through the Green's function.

    Raises
    ------
    NonuniqueProblemError
        If ``|u~(t0)| <= 1e-10 (1 + |t0|)``.
    """
    kernel = GreenKernel.from_coefficients(problem.coeffs)
    utilde_t0 = float(kernel.pair.u(problem.t0))
    _reject_degenerate(problem, utilde_t0, uniqueness_threshold(problem.t0))
    ubar_t0 = ubar(problem, problem.t0, tol, kernel)
    lam = (problem.c - ubar_t0) / utilde_t0
    return Solution(problem, kernel.case, lambda x: ubar(problem, x, tol, kernel), kernel.pair.u,
                    lam, ubar_t0, "green")


def _antiderivatives(problem: ProblemSpec, base: float, tol: float):
    """``H(t) = int_base^t h`` and ``HH(t) = int_base^t H = int_base^t (t - s) h(s) ds``."""
    h = problem.h
    bps = list(h.breakpoints)
    sps = list(h.singular_points)

    def H(t):
        return integrate(h.func, base, t, bps, sps, tol=tol)

    def HH(t):
        return integrate(lambda s: (t - s) * np.asarray(h.func(s), float), base, t, bps, sps, tol=tol)

    return H, HH


def closed_form_c31(problem: ProblemSpec, tol: float = DEFAULT_TOL) -> Solution:
    """Quadrature-only solution for ``a = b`` (no kernel).

    With ``H(t) = int_t0^t h`` and ``HH(t) = int_t0^t H`` the function
    ``p = H - 2a HH_odd`` solves the equation, and

        u(t) = p(t) + (c - p(t0)) (1 - 2a t) / (1 - 2a t0).

    For ``t0 = 0`` this is ``H - 2a HH_odd + c (2at - 1)/(2a t0 - 1)``; for
    ``t0 != 0`` the extra ``p(t0) = -2a HH_odd(t0)`` term is what makes
    ``u(t0) = c`` hold.
    """
    case = classify(problem.coeffs)
    if case.tag != C3_PLUS:
        raise InvalidInputError(f"closed_form_c31 needs a = b, got case {case.tag}")
    a = 0.5 * (problem.a + problem.b)
    t0 = problem.t0
    if abs(2 * a * t0 - 1) <= C31_DEGENERACY_TOL:
        _reject_degenerate(problem, 1 - 2 * a * t0, math.inf)
    H, HH = _antiderivatives(problem, t0, tol)

    def p(t):
        return H(t) - a * (HH(t) - HH(-t))

    def utilde(t):
        return 1.0 - 2.0 * a * np.asarray(t, float)

    p0 = p(0.0)

    def ubar_func(t):
        return p(t) - p0 * float(utilde(t))

    ubar_t0 = ubar_func(t0)
    lam = (problem.c - ubar_t0) / (1 - 2 * a * t0)
    return Solution(problem, case, ubar_func, utilde, lam, ubar_t0, "closed_form_c31")


def closed_form_c32(problem: ProblemSpec, tol: float = DEFAULT_TOL) -> Solution:
    """Quadrature-only solution for ``a = -b``; valid for every ``t0``.

    With ``H(t) = int_0^t h`` and ``HH(t) = int_0^t H``:

        u(t) = H(t) - H(t0) + 2a (HH_even(t) - HH_even(t0)) + c

    The ``+2a`` sign is the one for which ``u' + a u(-t) - a u(t) = h``.
    """
    case = classify(problem.coeffs)
    if case.tag != C3_MINUS:
        raise InvalidInputError(f"closed_form_c32 needs a = -b, got case {case.tag}")
    a = 0.5 * (problem.a - problem.b)
    H, HH = _antiderivatives(problem, 0.0, tol)

    def ubar_func(t):
        return H(t) + a * (HH(t) + HH(-t))

    ubar_t0 = ubar_func(problem.t0)
    lam = problem.c - ubar_t0
    return Solution(problem, case, ubar_func, lambda t: np.ones_like(np.asarray(t, float))[()], lam, ubar_t0,
                    "closed_form_c32")
