"""Coefficient regimes and the normalized homogeneous solutions.

For ``u'(t) + a u(-t) + b u(t) = 0`` every solution is a multiple of

    u~(t) = C(t) - (a + b) S(t)

where ``C``/``S`` are the even/odd fundamental pair of ``u'' + (a^2 - b^2) u = 0``:
``cos``/``sin(w t)/w`` when ``a^2 > b^2``, ``cosh``/``sinh(w t)/w`` when
``a^2 < b^2`` and ``1``/``t`` when ``a^2 = b^2``.  The companion ``v~`` solves
the same equation with the sign of ``a`` flipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInputError

C1 = "C1"
C2 = "C2"
C3_PLUS = "C3plus"
C3_MINUS = "C3minus"
CASE_TAGS = (C1, C2, C3_PLUS, C3_MINUS)

DEFAULT_CLASSIFY_TOL = 1e-12


@dataclass(frozen=True)
class Coefficients:
    """Reflection coefficient ``a`` and identity coefficient ``b``."""

    a: float
    b: float

    def __post_init__(self):
        for name in ("a", "b"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError) as exc:
                raise InvalidInputError(f"coefficient {name} is not a real number") from exc
            if not math.isfinite(value):
                raise InvalidInputError(f"coefficient {name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    def negated(self) -> "Coefficients":
        return Coefficients(-self.a, -self.b)


@dataclass(frozen=True)
class CaseClass:
    tag: str
    omega: float

    @property
    def is_c3(self) -> bool:
        return self.tag in (C3_PLUS, C3_MINUS)


def _as_coefficients(coeffs) -> Coefficients:
    if isinstance(coeffs, Coefficients):
        return coeffs
    a, b = coeffs
    return Coefficients(a, b)


def classify(coeffs, tol: float = DEFAULT_CLASSIFY_TOL) -> CaseClass:
    """Return the regime of ``(a, b)``.

    ``a^2 = b^2`` is decided with the relative test
    ``|a^2 - b^2| <= tol * (a^2 + b^2 + 1)``.  Inside that band the C3
    subtag follows whichever of ``a - b`` and ``a + b`` is smaller; when
    both vanish (``a = b = 0``) the answer is C3minus, where ``u~ = 1``.
    """
    coeffs = _as_coefficients(coeffs)
    if not (tol >= 0 and math.isfinite(tol)):
        raise InvalidInputError(f"tolerance must be finite and non-negative, got {tol!r}")
    a, b = coeffs.a, coeffs.b
    disc = a * a - b * b
    if abs(disc) <= tol * (a * a + b * b + 1.0):
        if abs(a - b) < abs(a + b):
            return CaseClass(C3_PLUS, 0.0)
        return CaseClass(C3_MINUS, 0.0)
    omega = math.sqrt(abs(disc))
    return CaseClass(C1 if disc > 0 else C2, omega)


@dataclass(frozen=True)
class Basis:
    """Even/odd fundamental pair ``C``, ``S`` with ``C(0) = 1``, ``S'(0) = 1``.

    ``S' = C`` and ``C' = -kappa * S`` where ``kappa`` is ``w^2``, ``-w^2``
    or ``0`` depending on the regime.
    """

    kind: str  # "trig", "hyp" or "poly"
    omega: float

    @classmethod
    def for_case(cls, case: CaseClass) -> "Basis":
        if case.tag == C1:
            return cls("trig", case.omega)
        if case.tag == C2:
            return cls("hyp", case.omega)
        return cls("poly", 0.0)

    @property
    def kappa(self) -> float:
        if self.kind == "trig":
            return self.omega * self.omega
        if self.kind == "hyp":
            return -self.omega * self.omega
        return 0.0

    def C(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "trig":
            return np.cos(self.omega * x)
        if self.kind == "hyp":
            return np.cosh(self.omega * x)
        return np.ones_like(x)[()]

    def S(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "trig":
            return np.sin(self.omega * x) / self.omega
        if self.kind == "hyp":
            return np.sinh(self.omega * x) / self.omega
        return x * 1.0

    def dC(self, x):
        return -self.kappa * self.S(x)

    def dS(self, x):
        return self.C(x)


@dataclass(frozen=True)
class HomogeneousPair:
    """``u~`` and ``v~`` for given coefficients, with derivatives and parity parts.

    All evaluators accept scalars or arrays.
    """

    coeffs: Coefficients
    case: CaseClass

    @property
    def basis(self) -> Basis:
        return Basis.for_case(self.case)

    # u~ = C - (a+b) S,  v~ = C - (b-a) S
    def u(self, t):
        a, b = self.coeffs.a, self.coeffs.b
        return self.basis.C(t) - (a + b) * self.basis.S(t)

    def v(self, t):
        a, b = self.coeffs.a, self.coeffs.b
        return self.basis.C(t) - (b - a) * self.basis.S(t)

    def du(self, t):
        a, b = self.coeffs.a, self.coeffs.b
        return self.basis.dC(t) - (a + b) * self.basis.dS(t)

    def dv(self, t):
        a, b = self.coeffs.a, self.coeffs.b
        return self.basis.dC(t) - (b - a) * self.basis.dS(t)

    def u_even(self, t):
        return self.basis.C(t)

    def v_even(self, t):
        return self.basis.C(t)

    def u_odd(self, t):
        return -(self.coeffs.a + self.coeffs.b) * self.basis.S(t)

    def v_odd(self, t):
        return -(self.coeffs.b - self.coeffs.a) * self.basis.S(t)

    def wronskian_like(self, t):
        """``u~_e v~_e - u~_o v~_o``, identically one."""
        return self.u_even(t) * self.v_even(t) - self.u_odd(t) * self.v_odd(t)


def homogeneous_pair(coeffs, case: CaseClass | None = None) -> HomogeneousPair:
    coeffs = _as_coefficients(coeffs)
    if case is None:
        case = classify(coeffs)
    elif case.tag not in CASE_TAGS:
        raise InvalidInputError(f"unknown case tag {case.tag!r}")
    return HomogeneousPair(coeffs, case)


def even_odd(f: Callable, t):
    """Even and odd parts of ``f`` at ``t``."""
    plus = f(t)
    minus = f(-t)
    return (plus + minus) / 2, (plus - minus) / 2
