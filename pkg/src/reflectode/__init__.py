"""Green's-function solver for ``u'(t) + a u(-t) + b u(t) = h(t)``, ``u(t0) = c``.

The package classifies the coefficient regime, evaluates the explicit
Green's function, solves initial value problems by quadrature, reports where
the Green's function keeps a constant sign, and checks all of it against
independent shooting and collocation solvers.
"""

__version__ = "0.1.0"

from .analysis import SignReport, degenerate_t0, eta, sign_report, sigma
from .core import CaseClass, Coefficients, classify, even_odd, homogeneous_pair
from .errors import (DomainError, HypothesisViolatedError, InvalidInputError, NonuniqueProblemError,
                     QuadratureError, ReflectodeError)
from .expr import parse_forcing
from .kernel import GreenKernel, chi, green_eval, green_grid
from .nthorder import AuxPair, NthProblem, construct, verify_aux
from .oracle import OracleResult, collocation_solve, residual, shooting_solve
from .quadrature import Forcing, integrate, iterated_kernel_integral
from .solver import ProblemSpec, Solution, closed_form_c31, closed_form_c32, solve, ubar

__all__ = [
    "AuxPair", "CaseClass", "Coefficients", "DomainError", "Forcing", "GreenKernel", "HypothesisViolatedError",
    "InvalidInputError", "NonuniqueProblemError", "NthProblem", "OracleResult", "ProblemSpec",
    "QuadratureError", "ReflectodeError", "SignReport", "Solution", "chi", "classify", "closed_form_c31",
    "closed_form_c32", "collocation_solve", "construct", "degenerate_t0", "eta", "even_odd", "green_eval",
    "green_grid", "homogeneous_pair", "integrate", "iterated_kernel_integral", "parse_forcing", "residual",
    "shooting_solve", "sign_report", "sigma", "solve", "ubar", "verify_aux",
]
