"""Problem configuration files (YAML).

Example::

    f: "y"
    alpha: "1/2"        # "p/q" or a decimal (converted with denominator <= 1e6)
    c0: 1.0
    a: 1.0
    b: 1.0
    n: 5
    solver:
      t_end: 0.5
      steps: 160
      mode: regularized  # direct | regularized | both
      corrector_iterations: 1
      handoff: null      # x at which a regularized run hands off to direct steps
      reference:
        kind: mittag_leffler   # none | mittag_leffler | expression | fine
        scale: 1.0             # y_ref(x) = scale * E_alpha(rate * x^alpha)
        rate: 1.0
    order:
      levels: 3
      fine_factor: 8
    theorem:            # optional constants for the budget inequality
      C0: 1.0
      C1: 1.0
      K: 1.0
    bound_grid: 33
    output: out
    tolerances:
      zero: 1.0e-12
      route: 1.0e-10
      derivative_zero: 1.0e-14
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import yaml

from .errors import ConfigError
from .exprkit import Expr, free_variables, parse
from .lattice import Alpha

MODES = ("direct", "regularized", "both")
REFERENCE_KINDS = ("none", "mittag_leffler", "expression", "fine")


@dataclass(frozen=True)
class Reference:
    kind: str = "none"
    scale: float = 1.0
    rate: float = 1.0
    expr: Optional[str] = None


@dataclass(frozen=True)
class SolverSettings:
    t_end: float = 1.0
    steps: int = 64
    mode: str = "direct"
    corrector_iterations: int = 1
    handoff: Optional[float] = None
    reference: Reference = field(default_factory=Reference)


@dataclass(frozen=True)
class Tolerances:
    zero: float = 1e-12
    route: float = 1e-10
    derivative_zero: float = 1e-14


@dataclass(frozen=True)
class TheoremConstants:
    C0: float
    C1: float
    K: float


@dataclass(frozen=True)
class ProblemConfig:
    f: str
    alpha: Alpha
    c0: float = 0.0
    a: float = 1.0
    b: float = 1.0
    n: int = 5
    solver: SolverSettings = field(default_factory=SolverSettings)
    order_levels: int = 3
    fine_factor: int = 8
    theorem: Optional[TheoremConstants] = None
    bound_grid: int = 33
    output: str = "out"
    tolerances: Tolerances = field(default_factory=Tolerances)

    @property
    def expr(self) -> Expr:
        return parse(self.f)


def _number(raw: dict, key: str, default: Any, kind=float) -> Any:
    value = raw.get(key, default)
    if value is None:
        return None
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a {kind.__name__}, got {value!r}") from None
    if kind is float and not math.isfinite(out):
        raise ConfigError(f"{key} must be finite")
    if kind is int and out != value and not isinstance(value, str):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return out


def _section(raw: dict, key: str) -> dict:
    value = raw.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"{key} must be a mapping")
    return value


def _reference(raw: Any) -> Reference:
    if raw is None or raw == "none":
        return Reference()
    if isinstance(raw, str):
        raw = {"kind": raw}
    if not isinstance(raw, dict):
        raise ConfigError("solver.reference must be a mapping or a kind name")
    kind = raw.get("kind", "none")
    if kind not in REFERENCE_KINDS:
        raise ConfigError(f"reference kind must be one of {REFERENCE_KINDS}")
    ref = Reference(
        kind,
        _number(raw, "scale", 1.0),
        _number(raw, "rate", 1.0),
        raw.get("expr"),
    )
    if kind == "expression":
        if not ref.expr:
            raise ConfigError("expression reference needs an 'expr' entry")
        if "y" in free_variables(parse(str(ref.expr))):
            raise ConfigError("reference expression may only depend on x")
    return ref


def from_mapping(raw: dict) -> ProblemConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping")
    unknown = set(raw) - {
        "f", "alpha", "c0", "a", "b", "n", "solver", "order", "theorem",
        "bound_grid", "output", "tolerances",
    }
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    if "f" not in raw or "alpha" not in raw:
        raise ConfigError("configuration needs at least 'f' and 'alpha'")
    f = str(raw["f"])
    parse(f)
    alpha = Alpha.parse(raw["alpha"])
    solver_raw = _section(raw, "solver")
    mode = solver_raw.get("mode", "direct")
    if mode not in MODES:
        raise ConfigError(f"solver.mode must be one of {MODES}")
    solver = SolverSettings(
        t_end=_number(solver_raw, "t_end", 1.0),
        steps=_number(solver_raw, "steps", 64, int),
        mode=mode,
        corrector_iterations=_number(solver_raw, "corrector_iterations", 1, int),
        handoff=_number(solver_raw, "handoff", None),
        reference=_reference(solver_raw.get("reference")),
    )
    order_raw = _section(raw, "order")
    theorem_raw = raw.get("theorem")
    theorem = None
    if theorem_raw is not None:
        if not isinstance(theorem_raw, dict):
            raise ConfigError("theorem must be a mapping with C0, C1 and K")
        theorem = TheoremConstants(
            _number(theorem_raw, "C0", None),
            _number(theorem_raw, "C1", None),
            _number(theorem_raw, "K", None),
        )
        if None in (theorem.C0, theorem.C1, theorem.K):
            raise ConfigError("theorem needs C0, C1 and K")
    tol_raw = _section(raw, "tolerances")
    cfg = ProblemConfig(
        f=f,
        alpha=alpha,
        c0=_number(raw, "c0", 0.0),
        a=_number(raw, "a", 1.0),
        b=_number(raw, "b", 1.0),
        n=_number(raw, "n", 5, int),
        solver=solver,
        order_levels=_number(order_raw, "levels", 3, int),
        fine_factor=_number(order_raw, "fine_factor", 8, int),
        theorem=theorem,
        bound_grid=_number(raw, "bound_grid", 33, int),
        output=str(raw.get("output", "out")),
        tolerances=Tolerances(
            _number(tol_raw, "zero", 1e-12),
            _number(tol_raw, "route", 1e-10),
            _number(tol_raw, "derivative_zero", 1e-14),
        ),
    )
    validate(cfg)
    return cfg


def validate(cfg: ProblemConfig) -> None:
    if cfg.a <= 0 or cfg.b <= 0:
        raise ConfigError("a and b must be positive")
    if cfg.n < 1:
        raise ConfigError("n must be a positive integer")
    if cfg.solver.t_end <= 0:
        raise ConfigError("solver.t_end must be positive")
    if cfg.solver.steps < 2:
        raise ConfigError("solver.steps must be at least 2")
    if cfg.solver.corrector_iterations < 1:
        raise ConfigError("solver.corrector_iterations must be positive")
    if cfg.order_levels < 2:
        raise ConfigError("order.levels must be at least 2")
    if cfg.bound_grid < 2:
        raise ConfigError("bound_grid must be at least 2")


def load(path: str | Path) -> ProblemConfig:
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read configuration {path}: {err}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ConfigError(f"invalid YAML in {path}: {err}") from None
    return from_mapping(raw or {})


def with_overrides(cfg: ProblemConfig, **overrides: Any) -> ProblemConfig:
    """Apply command-line overrides; keys with value ``None`` are ignored."""
    solver_keys = {"mode", "steps", "t_end"}
    top = {k: v for k, v in overrides.items() if v is not None and k not in solver_keys}
    solver = {k: v for k, v in overrides.items() if v is not None and k in solver_keys}
    if "alpha" in top and not isinstance(top["alpha"], Alpha):
        top["alpha"] = Alpha.parse(top["alpha"])
    if "f" in top:
        parse(top["f"])
    if solver:
        if "mode" in solver and solver["mode"] not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        top["solver"] = replace(cfg.solver, **solver)
    out = replace(cfg, **top)
    validate(out)
    return out
