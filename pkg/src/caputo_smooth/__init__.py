"""Singular expansions and regularized solvers for Caputo fractional ODEs.

For ``D^alpha y = f(x, y)``, ``y(0) = c0`` with rational ``alpha`` in (0, 1)
and ``f`` of class ``C^n``, the solution behaves near the origin like

    S(x) = c0 + sum_j c_j x^gamma_j,    gamma_j = i + j*alpha < m,

with ``m = ceil(n*alpha) - 1``.  This package computes the coefficients
``c_j`` (by a closed-form recursion, cross-checked against a series
expansion), decides whether the solution is ``C^m`` near 0, and integrates
the equation either directly or after subtracting ``S``.
"""

from .errors import (
    CaputoSmoothError,
    ConfigError,
    DepthExceededError,
    ExprSyntaxError,
    InconsistencyError,
    MathDomainError,
    TrivialLatticeError,
)
from .expansion import (
    SingularExpansion,
    SmoothnessReport,
    check_smoothness,
    compute_expansion,
    eval_S,
    eval_S_prime,
    h_star,
)
from .exprkit import derivative_table, parse
from .lattice import Alpha, Exponent, build_lattice
from .volterra import Mode, SolveConfig, SolveResult, estimate_order, mittag_leffler, solve

__version__ = "0.1.0"

__all__ = [
    "Alpha",
    "CaputoSmoothError",
    "ConfigError",
    "DepthExceededError",
    "Exponent",
    "ExprSyntaxError",
    "InconsistencyError",
    "MathDomainError",
    "Mode",
    "SingularExpansion",
    "SmoothnessReport",
    "SolveConfig",
    "SolveResult",
    "TrivialLatticeError",
    "build_lattice",
    "check_smoothness",
    "compute_expansion",
    "derivative_table",
    "estimate_order",
    "eval_S",
    "eval_S_prime",
    "h_star",
    "mittag_leffler",
    "parse",
    "solve",
]
