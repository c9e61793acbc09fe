"""Green's function of ``u'(t) + a u(-t) + b u(t) = h(t)`` with data at 0.

Written with the oriented characteristic function ``chi``:

    G(t, s) = A(t, s) chi_0^t(s) + B(t, s) chi_{-t}^0(s)
    A(t, s) = C(s - t) + b S(s - t)
    B(t, s) = a S(s + t)

``A`` and ``B`` are the closed forms of the half sum and half difference
``[u~(-s) v~(t) +- v~(-s) u~(t)] / 2``.  The closed forms are the default
evaluation path because the products cancel catastrophically in the
hyperbolic regime for large ``w |t|``; the product form is kept as
:func:`green_eval_products` for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CaseClass, Coefficients, HomogeneousPair, _as_coefficients, classify, homogeneous_pair
from .errors import InvalidInputError


def chi(t1, t2, t):
    """Oriented characteristic function of ``(t1, t2)`` evaluated at ``t``.

    ``1`` on ``t1 <= t <= t2``, ``-1`` on ``t2 <= t < t1`` and ``0``
    elsewhere.  The inequalities are applied literally, so ``chi`` of a
    degenerate pair is ``1`` at its single point.

    >>> chi(0, 2, 1), chi(2, 0, 1), chi(0, 2, 3)
    (1, -1, 0)
    """
    if np.ndim(t1) == 0 and np.ndim(t2) == 0 and np.ndim(t) == 0:
        if t1 <= t <= t2:
            return 1
        if t2 <= t < t1:
            return -1
        return 0
    t1, t2, t = np.broadcast_arrays(np.asarray(t1, float), np.asarray(t2, float), np.asarray(t, float))
    out = np.zeros(t.shape, dtype=int)
    out[(t1 <= t) & (t <= t2)] = 1
    out[(t2 <= t) & (t < t1)] = -1
    return out


@dataclass(frozen=True)
class GreenKernel:
    coeffs: Coefficients
    case: CaseClass
    pair: HomogeneousPair

    @classmethod
    def from_coefficients(cls, coeffs, case: CaseClass | None = None) -> "GreenKernel":
        coeffs = _as_coefficients(coeffs)
        case = case if case is not None else classify(coeffs)
        return cls(coeffs, case, homogeneous_pair(coeffs, case))

    def forward_part(self, t, s):
        """``A(t, s)``, the factor of ``chi_0^t(s)``."""
        basis = self.pair.basis
        d = np.asarray(s, float) - np.asarray(t, float)
        return basis.C(d) + self.coeffs.b * basis.S(d)

    def reflected_part(self, t, s):
        """``B(t, s)``, the factor of ``chi_{-t}^0(s)``."""
        return self.coeffs.a * self.pair.basis.S(np.asarray(s, float) + np.asarray(t, float))

    def __call__(self, t, s):
        return green_eval(self, t, s)


def _check_finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("kernel arguments must be finite")


def _combine(first, chi_first, second, chi_second):
    # inactive branches may overflow (cosh of a large argument); their products are discarded
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(chi_first != 0, first * chi_first, 0.0) + np.where(chi_second != 0, second * chi_second, 0.0)
    return out[()] if isinstance(out, np.ndarray) else out


def _branch_weights(t, s):
    """``chi_0^t(s)`` and ``chi_{-t}^0(s)``, except that ``s = 0`` with ``t > 0`` takes the forward branch only.

    Read literally, both indicators equal 1 at ``s = 0`` when ``t > 0``, and
    their sum matches neither one-sided limit.  Dropping the reflected term
    there makes ``G(t, 0) = G(t, 0+)`` for every ``t != 0``; for ``t < 0`` the
    literal formula already gives that value.
    """
    t = np.asarray(t, float)
    s = np.asarray(s, float)
    zero = np.zeros_like(t)
    forward = chi(zero, t, s)
    reflected = np.where((s == 0) & (t > 0), 0, chi(-t, zero, s))
    return forward, reflected


def green_eval(kernel: GreenKernel, t, s):
    """Value of ``G(t, s)``; zero outside ``|s| <= |t|``."""
    _check_finite(t, s)
    with np.errstate(over="ignore", invalid="ignore"):
        fwd = kernel.forward_part(t, s)
        ref = kernel.reflected_part(t, s)
    w_fwd, w_ref = _branch_weights(t, s)
    return _combine(fwd, w_fwd, ref, w_ref)


def green_eval_products(kernel: GreenKernel, t, s):
    """``G(t, s)`` assembled from products of ``u~`` and ``v~``.

    Mathematically identical to :func:`green_eval`; loses relative accuracy
    like ``exp(2 w |s|) * eps`` in the hyperbolic regime.
    """
    _check_finite(t, s)
    p = kernel.pair
    t = np.asarray(t, float)
    s = np.asarray(s, float)
    with np.errstate(over="ignore", invalid="ignore"):
        x = p.u(-s) * p.v(t)
        y = p.v(-s) * p.u(t)
    w_fwd, w_ref = _branch_weights(t, s)
    return _combine(0.5 * (x + y), w_fwd, 0.5 * (x - y), w_ref)


def lattice(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n)


def green_grid(kernel: GreenKernel, t_range, s_range, n: int) -> np.ndarray:
    """``G`` on the ``n x n`` uniform lattice; row ``i`` is ``t_i``, column ``j`` is ``s_j``."""
    if int(n) != n or n < 2:
        raise InvalidInputError(f"grid size must be an integer >= 2, got {n!r}")
    (t_lo, t_hi), (s_lo, s_hi) = t_range, s_range
    bounds = np.array([t_lo, t_hi, s_lo, s_hi], dtype=float)
    if not np.all(np.isfinite(bounds)):
        raise InvalidInputError("grid ranges must be finite")
    if t_lo > t_hi or s_lo > s_hi:
        raise InvalidInputError("grid ranges must satisfy lo <= hi")
    ts = lattice(t_lo, t_hi, int(n))
    ss = lattice(s_lo, s_hi, int(n))
    tt, sg = np.meshgrid(ts, ss, indexing="ij")
    return np.asarray(green_eval(kernel, tt, sg), dtype=float)
