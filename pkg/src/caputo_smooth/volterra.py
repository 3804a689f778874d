"""Fractional Adams predictor-corrector for

    y(x) = c0 + 1/Gamma(alpha) int_0^x (x - t)^(alpha-1) f(t, y(t)) dt

in two formulations:

``direct``
    steps ``y`` itself; the integrand inherits the ``x^alpha``-type
    singularities of ``y`` and the observed order drops accordingly.
``regularized``
    steps ``z = y - S``.  With ``G`` the nested-integral series of the
    singular expansion (so ``J^alpha G = Q``) the equation is rewritten as

        z = (Q - S + c0) + J^alpha [ f(t, z + S) - G(t) ]

    The singular part of the integrand is integrated exactly through ``Q``
    and only the smooth remainder goes through the quadrature.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .errors import ConfigError, MathDomainError
from .expansion import SingularExpansion, eval_S, smooth_remainder
from .exprkit import Expr, derivative_table, evaluate
from .gpseries import frac_integrate, nested_series
from .lattice import Alpha, Exponent

MAX_STEPS = 100_000
ML_MAX_ARGUMENT = 5.0


class Mode(str, enum.Enum):
    DIRECT = "direct"
    REGULARIZED = "regularized"


@dataclass(frozen=True)
class SolveConfig:
    alpha: Alpha
    c0: float
    t_end: float
    steps: int
    mode: Mode = Mode.DIRECT
    expansion: Optional[SingularExpansion] = None
    corrector_iterations: int = 1
    #: half-width ``b`` of the admissible strip ``|y - c0| <= b``; ``None`` disables the check
    bound: Optional[float] = None
    max_steps: int = MAX_STEPS

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        if not self.t_end > 0:
            raise ConfigError("t_end must be positive")
        if self.steps < 2:
            raise ConfigError("steps must be at least 2")
        if self.steps > self.max_steps:
            raise ConfigError(f"steps={self.steps} exceeds the cap {self.max_steps}")
        if self.corrector_iterations < 1:
            raise ConfigError("corrector_iterations must be positive")
        if self.mode is Mode.REGULARIZED:
            if self.expansion is None:
                raise ConfigError("regularized mode needs a singular expansion")
            if self.expansion.alpha != self.alpha or self.expansion.c0 != self.c0:
                raise ConfigError("expansion was computed for a different alpha or c0")


@dataclass
class SolveResult:
    x: np.ndarray
    y: np.ndarray
    mode: Mode
    z: Optional[np.ndarray] = None
    S: Optional[np.ndarray] = None
    wall_time: float = 0.0

    @property
    def final(self) -> float:
        return float(self.y[-1])


@dataclass(frozen=True)
class _Weights:
    """Product-integration weights on a uniform grid, indexed by lag.

    predictor: ``b[l] = (l+1)^a - l^a``
    corrector: ``a[l] = (l+2)^(a+1) - 2(l+1)^(a+1) + l^(a+1)`` for ``j >= 1``
    """

    rect: np.ndarray
    trap: np.ndarray
    alpha: float
    h: float

    @classmethod
    def build(cls, alpha: float, steps: int, h: float) -> "_Weights":
        lags = np.arange(steps + 2, dtype=float)
        p = lags**alpha
        rect = p[1:] - p[:-1]
        q = lags ** (alpha + 1.0)
        trap = q[2:] - 2.0 * q[1:-1] + q[:-2]
        return cls(rect, trap, alpha, h)

    def first_trap(self, k: int) -> float:
        """Corrector weight of node 0 when computing node ``k + 1``."""
        a = self.alpha
        return k ** (a + 1.0) - (k - a) * (k + 1) ** a


class _Problem:
    """Forcing term and integrand for one formulation of the equation."""

    def __init__(self, f: Expr, cfg: SolveConfig, x: np.ndarray) -> None:
        self.f = f
        self.cfg = cfg
        if cfg.mode is Mode.DIRECT:
            self.forcing = np.full_like(x, cfg.c0)
            self.shift = np.zeros_like(x)
            self.known = np.zeros_like(x)
            return
        e = cfg.expansion
        table = derivative_table(f, max(e.n, 1), cfg.c0)
        cutoff = Exponent(e.m + 1)
        G = nested_series(table, e.pairs(), e.alpha, e.n, cutoff)
        Q = frac_integrate(G.with_cutoff(None), e.alpha)
        if e.J:
            rest = smooth_remainder(Q, e)
        else:
            rest = Q
        # forcing = c0 - S + Q, with the matched part cancelled exactly
        self.forcing = rest(x) if len(rest) else np.zeros_like(x)
        self.shift = eval_S(e, x)
        self.known = G(x) if len(G) else np.zeros_like(x)

    def integrand(self, k: int, xk: float, u: float) -> float:
        try:
            value = evaluate(self.f, xk, u + self.shift[k])
        except MathDomainError as err:
            raise MathDomainError(f"step {k}: {err}") from None
        return value - self.known[k]


def _check_iterate(cfg: SolveConfig, k: int, y: float) -> None:
    if not math.isfinite(y):
        raise MathDomainError(f"step {k}: iterate is not finite")
    if cfg.bound is not None and abs(y - cfg.c0) > cfg.bound:
        raise MathDomainError(
            f"step {k}: iterate y={y:.6g} left the strip [c0-b, c0+b] with b={cfg.bound}"
        )


def solve(cfg: SolveConfig, f: Expr) -> SolveResult:
    """Fractional Adams-Bashforth-Moulton integration on a uniform grid.

    Product-rectangle predictor, then ``cfg.corrector_iterations`` sweeps of
    the product-trapezoid corrector.
    """
    start = time.perf_counter()
    N = cfg.steps
    h = cfg.t_end / N
    x = np.arange(N + 1, dtype=float) * h
    x[-1] = cfg.t_end
    al = float(cfg.alpha)
    w = _Weights.build(al, N, h)
    prob = _Problem(f, cfg, x)
    pred_scale = h**al / math.gamma(al + 1.0)
    corr_scale = h**al / math.gamma(al + 2.0)

    u = np.zeros(N + 1)
    g = np.zeros(N + 1)
    u[0] = 0.0 if cfg.mode is Mode.REGULARIZED else cfg.c0
    g[0] = prob.integrand(0, x[0], u[0])
    for k in range(N):
        hist = g[: k + 1]
        predictor = prob.forcing[k + 1] + pred_scale * float(np.dot(w.rect[k::-1], hist))
        lag_sum = w.first_trap(k) * g[0]
        if k >= 1:
            lag_sum += float(np.dot(w.trap[k - 1 :: -1], g[1 : k + 1]))
        value = predictor
        for _ in range(cfg.corrector_iterations):
            _check_iterate(cfg, k + 1, value + prob.shift[k + 1])
            g_new = prob.integrand(k + 1, x[k + 1], value)
            value = prob.forcing[k + 1] + corr_scale * (g_new + lag_sum)
        y_new = value + prob.shift[k + 1]
        _check_iterate(cfg, k + 1, y_new)
        u[k + 1] = value
        g[k + 1] = prob.integrand(k + 1, x[k + 1], value)

    elapsed = time.perf_counter() - start
    if cfg.mode is Mode.DIRECT:
        return SolveResult(x, u, cfg.mode, wall_time=elapsed)
    y = u + prob.shift
    y[0] = cfg.c0
    return SolveResult(x, y, cfg.mode, z=u, S=prob.shift, wall_time=elapsed)


def solve_handoff(cfg: SolveConfig, f: Expr, handoff_x: float) -> SolveResult:
    """Regularized steps on ``[0, handoff_x]``, direct steps afterwards.

    The direct phase reuses the reconstructed ``y`` values of the first phase
    as its history; there is no dedicated restart formula.
    """
    if cfg.mode is not Mode.REGULARIZED:
        raise ConfigError("handoff needs a regularized configuration")
    first = solve(cfg, f)
    N = cfg.steps
    h = cfg.t_end / N
    switch = min(N, max(1, int(math.floor(handoff_x / h + 1e-9))))
    x = first.x
    al = float(cfg.alpha)
    w = _Weights.build(al, N, h)
    pred_scale = h**al / math.gamma(al + 1.0)
    corr_scale = h**al / math.gamma(al + 2.0)
    y = first.y.copy()
    g = np.array([evaluate(f, x[k], y[k]) for k in range(switch + 1)] + [0.0] * (N - switch))
    for k in range(switch, N):
        hist = g[: k + 1]
        value = cfg.c0 + pred_scale * float(np.dot(w.rect[k::-1], hist))
        lag_sum = w.first_trap(k) * g[0] + float(np.dot(w.trap[k - 1 :: -1], g[1 : k + 1]))
        for _ in range(cfg.corrector_iterations):
            _check_iterate(cfg, k + 1, value)
            value = cfg.c0 + corr_scale * (evaluate(f, x[k + 1], value) + lag_sum)
        _check_iterate(cfg, k + 1, value)
        y[k + 1] = value
        g[k + 1] = evaluate(f, x[k + 1], value)
    z = first.z.copy()
    z[switch + 1 :] = np.nan
    return SolveResult(x, y, cfg.mode, z=z, S=first.S, wall_time=first.wall_time)


def mittag_leffler(alpha: Union[Alpha, float], x: float, tol: float = 1e-15) -> float:
    """``E_alpha(x) = sum_k x^k / Gamma(alpha k + 1)`` by direct summation.

    Summation stops once five consecutive terms are below ``tol``.
    """
    a = float(alpha)
    if not 0 < a < 1:
        raise ConfigError("alpha must lie in (0,1)")
    if abs(x) > ML_MAX_ARGUMENT:
        raise MathDomainError(f"|x| = {abs(x)} outside the series regime |x| <= {ML_MAX_ARGUMENT}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    terms = [1.0]
    small = 0
    k = 0
    log_abs = math.log(abs(x)) if x != 0 else -math.inf
    while small < 5:
        k += 1
        if k > 10_000:
            raise MathDomainError("Mittag-Leffler series did not converge")
        if x == 0:
            term = 0.0
        else:
            term = math.exp(k * log_abs - math.lgamma(a * k + 1.0))
            if x < 0 and k % 2:
                term = -term
        terms.append(term)
        small = small + 1 if abs(term) < tol else 0
    return math.fsum(terms)


@dataclass
class OrderReport:
    mode: Mode
    steps: tuple[int, ...]
    errors: tuple[float, ...]
    orders: tuple[float, ...]
    reference: float

    @property
    def order(self) -> float:
        """Order observed between the two finest grids."""
        return self.orders[-1]


def empirical_order(e_coarse: float, e_fine: float, *, exact_tol: float = 1e-12) -> float:
    """``log2(e_coarse / e_fine)``; ``inf`` when both errors are at rounding level."""
    if e_coarse <= exact_tol and e_fine <= exact_tol:
        return math.inf
    if e_fine == 0.0:
        return math.inf
    return math.log2(e_coarse / e_fine)


def estimate_order(
    f: Expr,
    cfg: SolveConfig,
    reference: Union[float, str] = "fine",
    *,
    levels: int = 3,
    fine_factor: int = 8,
    exact_tol: float = 1e-12,
) -> OrderReport:
    """Errors at ``t_end`` for ``N, 2N, 4N, ...`` steps and the observed orders.

    ``reference`` is either the exact value ``y(t_end)`` or ``"fine"``, in
    which case a solve with ``fine_factor`` times the finest step count is
    used.
    """
    steps = tuple(cfg.steps * 2**i for i in range(levels))
    if reference == "fine":
        fine_cfg = _with_steps(cfg, steps[-1] * fine_factor)
        ref = solve(fine_cfg, f).final
    else:
        ref = float(reference)
    errors = tuple(abs(solve(_with_steps(cfg, n), f).final - ref) for n in steps)
    orders = tuple(
        empirical_order(errors[i], errors[i + 1], exact_tol=exact_tol) for i in range(levels - 1)
    )
    return OrderReport(cfg.mode, steps, errors, orders, ref)


def _with_steps(cfg: SolveConfig, steps: int) -> SolveConfig:
    return replace(cfg, steps=steps, max_steps=max(cfg.max_steps, steps))
