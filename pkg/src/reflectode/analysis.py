"""Sign structure of the Green's function and the thresholds that bound it.

The kernel lives on four triangles of the ``(t, s)`` plane:

    T1 = {0 < s < t}    T2 = {t < s < 0}    T3 = {-t < s < 0}    T4 = {0 < s < -t}

and on each of them its sign is either fixed or fixed only for ``t`` in an
interval ending at ``eta``, ``sigma``, ``pi / w`` or ``1 / a``.  The maximal
strip ``[alpha, beta] x R`` on which ``G`` keeps one sign gives the interval
where a maximum (``G >= 0``) or anti-maximum (``G <= 0``) principle holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import C1, C2, C3_MINUS, C3_PLUS, CaseClass, Coefficients, classify, homogeneous_pair
from .errors import DomainError

UNIQUENESS_TOL = 1e-10
SIGMA_EDGE = 1.0 - 1e-15

NONNEGATIVE = "nonnegative"
NONPOSITIVE = "nonpositive"


def uniqueness_threshold(t0: float) -> float:
    """``|u~(t0)|`` at or below this value means the problem is not uniquely solvable."""
    return UNIQUENESS_TOL * (1.0 + abs(t0))


def eta(a: float, b: float) -> float:
    """First positive zero of ``G(t, 0+)`` in the oscillatory regime ``a^2 > b^2``.

    ``arctan(w/b)/w`` for ``b > 0``, ``pi/(2|a|)`` for ``b = 0`` and
    ``(arctan(w/b) + pi)/w`` for ``b < 0``, with ``w = sqrt(a^2 - b^2)``.
    """
    case = classify(Coefficients(a, b))
    if case.tag != C1:
        raise DomainError(f"eta needs a^2 > b^2, got a={a!r}, b={b!r}")
    w = case.omega
    if b > 0:
        return math.atan(w / b) / w
    if b == 0:
        return math.pi / (2 * abs(a))
    return (math.atan(w / b) + math.pi) / w


def sigma(a: float, b: float) -> float:
    """Zero of ``G(t, 0+)`` in the hyperbolic regime ``a^2 < b^2``.

    ``arctanh(w/b)/w`` with ``w = sqrt(b^2 - a^2)``; it has the sign of ``b``
    and is infinite when ``a = 0`` (``w = |b|``).
    """
    case = classify(Coefficients(a, b))
    if case.tag != C2:
        raise DomainError(f"sigma needs a^2 < b^2, got a={a!r}, b={b!r}")
    w = case.omega
    z = w / b
    if abs(z) >= SIGMA_EDGE:
        return math.copysign(math.inf, b)
    return math.atanh(z) / w


@dataclass(frozen=True)
class DegenerateSet:
    """Zeros of ``u~``: empty, a single point, or ``base + k * spacing``."""

    kind: str  # "empty", "point", "progression"
    coeffs: Coefficients
    base: float = math.nan
    spacing: float = math.nan

    def describe(self) -> str:
        if self.kind == "empty":
            return "{} (u~ has no zeros)"
        if self.kind == "point":
            return f"{{{self.base!r}}}"
        return f"{{{self.base!r} + k*{self.spacing!r}, k integer}}"

    def points_in(self, lo: float, hi: float) -> list:
        if self.kind == "empty":
            return []
        if self.kind == "point":
            return [self.base] if lo <= self.base <= hi else []
        k_lo = math.ceil((lo - self.base) / self.spacing)
        k_hi = math.floor((hi - self.base) / self.spacing)
        return [self.base + k * self.spacing for k in range(k_lo, k_hi + 1)]

    def nearest(self, t0: float) -> float:
        if self.kind == "empty":
            return math.nan
        if self.kind == "point":
            return self.base
        return self.base + round((t0 - self.base) / self.spacing) * self.spacing

    def distance(self, t0: float) -> float:
        return math.inf if self.kind == "empty" else abs(t0 - self.nearest(t0))

    def contains(self, t0: float) -> bool:
        """Membership decided on ``u~(t0)`` itself, with the solver's threshold."""
        value = float(homogeneous_pair(self.coeffs).u(t0))
        return abs(value) <= uniqueness_threshold(t0)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind != "empty":
            out["base"] = self.base
        if self.kind == "progression":
            out["spacing"] = self.spacing
        return out


def degenerate_t0(a: float, b: float) -> DegenerateSet:
    """Initial points where uniqueness fails.

    Zeros of ``u~ = cos(w t) - ((a+b)/w) sin(w t)`` recur every ``pi / w``
    (not every ``pi``).
    """
    coeffs = Coefficients(a, b)
    case = classify(coeffs)
    s = coeffs.a + coeffs.b
    if case.tag == C1:
        w = case.omega
        return DegenerateSet("progression", coeffs, math.atan(w / s) / w, math.pi / w)
    if case.tag == C2:
        w = case.omega
        if coeffs.a * coeffs.b > 0 and abs(w / s) < 1.0:
            return DegenerateSet("point", coeffs, math.atanh(w / s) / w)
        return DegenerateSet("empty", coeffs)
    if case.tag == C3_PLUS and s != 0:
        # u~ = 1 - (a + b) t, i.e. t0 = 1/(2a) when a = b
        return DegenerateSet("point", coeffs, 1.0 / s)
    return DegenerateSet("empty", coeffs)


@dataclass(frozen=True)
class TriangleSign:
    """Sign of ``G`` on one triangle.

    ``kind`` is ``positive``, ``negative`` or ``zero`` (unconditional), or
    ``positive_iff`` / ``negative_iff`` with the open ``t``-interval on
    which the sign holds.
    """

    kind: str
    interval: tuple | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.interval is not None:
            out["interval"] = [_json_number(x) for x in self.interval]
        return out


@dataclass(frozen=True)
class Strip:
    lo: float
    hi: float
    sign: str

    def contains(self, t) -> np.ndarray:
        t = np.asarray(t, float)
        return (t >= self.lo) & (t <= self.hi)

    def mirrored(self) -> "Strip":
        return Strip(-self.hi, -self.lo, NONPOSITIVE if self.sign == NONNEGATIVE else NONNEGATIVE)

    def to_dict(self) -> dict:
        return {"interval": [_json_number(self.lo), _json_number(self.hi)], "sign": self.sign}


@dataclass(frozen=True)
class SignReport:
    coeffs: Coefficients
    case: CaseClass
    triangle_signs: dict
    strip: Strip
    thresholds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "a": self.coeffs.a,
            "b": self.coeffs.b,
            "case": self.case.tag,
            "omega": self.case.omega,
            "triangles": {k: v.to_dict() for k, v in self.triangle_signs.items()},
            "strip": self.strip.to_dict(),
            "thresholds": {k: _json_number(v) for k, v in self.thresholds.items()},
        }


def _json_number(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


POS, NEG, ZERO = TriangleSign("positive"), TriangleSign("negative"), TriangleSign("zero")


def _by_sign(value: float) -> TriangleSign:
    return POS if value > 0 else (NEG if value < 0 else ZERO)


def sign_report(a: float, b: float) -> SignReport:
    coeffs = Coefficients(a, b)
    a, b = coeffs.a, coeffs.b
    case = classify(coeffs)
    inf = math.inf
    if case.tag == C1:
        w = case.omega
        e_ab, e_anb, period = eta(a, b), eta(a, -b), math.pi / w
        refl = "positive_iff" if a > 0 else "negative_iff"
        tri = {
            "T1": TriangleSign("positive_iff", (0.0, e_ab)),
            "T2": TriangleSign("negative_iff", (-e_anb, 0.0)),
            "T3": TriangleSign(refl, (0.0, period)),
            "T4": TriangleSign(refl, (-period, 0.0)),
        }
        strip = Strip(0.0, e_ab, NONNEGATIVE) if a > 0 else Strip(-e_anb, 0.0, NONPOSITIVE)
        thresholds = {"eta(a,b)": e_ab, "eta(a,-b)": e_anb, "pi/omega": period}
    elif case.tag == C2:
        sg = sigma(a, b)
        tri = {"T3": _by_sign(a), "T4": _by_sign(a)}
        if b > 0:
            tri["T1"] = POS if math.isinf(sg) else TriangleSign("positive_iff", (0.0, sg))
            tri["T2"] = NEG
        else:
            tri["T1"] = POS
            tri["T2"] = NEG if math.isinf(sg) else TriangleSign("negative_iff", (sg, 0.0))
        if a == 0:
            # T3/T4 vanish; sigma is +-inf and the strip follows the sign of b
            strip = Strip(0.0, inf, NONNEGATIVE) if b > 0 else Strip(-inf, 0.0, NONPOSITIVE)
        elif 0 < a < b:
            strip = Strip(0.0, sg, NONNEGATIVE)
        elif b < -a < 0:
            strip = Strip(0.0, inf, NONNEGATIVE)
        elif b < a < 0:
            strip = Strip(sg, 0.0, NONPOSITIVE)
        else:  # b > -a > 0
            strip = Strip(-inf, 0.0, NONPOSITIVE)
        thresholds = {"sigma(a,b)": sg}
        tri = {k: tri[k] for k in ("T1", "T2", "T3", "T4")}
    elif case.tag == C3_PLUS:
        inv = 1.0 / a
        if a > 0:
            tri = {"T1": TriangleSign("positive_iff", (0.0, inv)), "T2": NEG, "T3": POS, "T4": POS}
            strip = Strip(0.0, inv, NONNEGATIVE)
        else:
            tri = {"T1": POS, "T2": TriangleSign("negative_iff", (inv, 0.0)), "T3": NEG, "T4": NEG}
            strip = Strip(inv, 0.0, NONPOSITIVE)
        thresholds = {"1/a": inv}
    else:  # C3minus
        if a > 0:
            tri = {"T1": POS, "T2": TriangleSign("negative_iff", (-1.0 / a, 0.0)), "T3": POS, "T4": POS}
            strip = Strip(0.0, inf, NONNEGATIVE)
            thresholds = {"1/a": 1.0 / a}
        elif a < 0:
            tri = {"T1": TriangleSign("positive_iff", (0.0, -1.0 / a)), "T2": NEG, "T3": NEG, "T4": NEG}
            strip = Strip(-inf, 0.0, NONPOSITIVE)
            thresholds = {"1/a": 1.0 / a}
        else:
            # a = b = 0: G = chi_0^t(s); both half-lines qualify, report t >= 0
            tri = {"T1": POS, "T2": NEG, "T3": ZERO, "T4": ZERO}
            strip = Strip(0.0, inf, NONNEGATIVE)
            thresholds = {}
    return SignReport(coeffs, case, tri, strip, thresholds)
