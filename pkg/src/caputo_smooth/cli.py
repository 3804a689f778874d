"""Command-line front-end: ``caputo-smooth {expand,check,solve,order,hstar}``.

Exit codes: 0 success, 1 configuration error, 2 mathematical domain error,
3 internal inconsistency between independent computations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence, TextIO

import numpy as np

from . import config as config_mod
from .config import ProblemConfig
from .errors import CaputoSmoothError, ConfigError, TrivialLatticeError
from .expansion import (
    SingularExpansion,
    TheoremBudget,
    budget_lhs,
    check_smoothness,
    compute_expansion,
    h_star,
    largest_admissible_h,
    norm_QS_prime,
    theorem_budget_holds,
    trivial_expansion,
)
from .exprkit import derivative_table, estimate_bound_M, evaluate, parse
from .gpseries import expand_Q
from .lattice import Alpha, Exponent
from .volterra import Mode, SolveConfig, estimate_order, mittag_leffler, solve, solve_handoff

log = logging.getLogger("caputo_smooth")

CSV_COLUMNS = ("step_index", "x", "y", "z", "S_of_x", "abs_err_vs_reference")


def fmt(value: Optional[float]) -> str:
    """15 significant digits; empty for missing values."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.15g}"


def _round(obj):
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(_round(payload), indent=2) + "\n")


def _alpha_dict(alpha: Alpha) -> dict:
    return {"p": alpha.p, "q": alpha.q, "value": float(alpha)}


def _expansion(cfg: ProblemConfig):
    """Both coefficient routes, or ``None`` when ``m = 0``."""
    table = derivative_table(cfg.expr, cfg.n, cfg.c0)
    try:
        routes = compute_expansion(table, cfg.alpha, cfg.n, tol=cfg.tolerances.route)
    except TrivialLatticeError:
        return table, None
    return table, routes


def _out_dir(cfg: ProblemConfig) -> Path:
    path = Path(cfg.output)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_expand(cfg: ProblemConfig, out: Optional[TextIO] = None) -> dict:
    out = out or sys.stdout
    table, routes = _expansion(cfg)
    print(f"f = {cfg.f}   alpha = {cfg.alpha}   c0 = {fmt(cfg.c0)}   n = {cfg.n}", file=out)
    if routes is None:
        exp = trivial_expansion(cfg.c0, cfg.alpha, cfg.n)
        print("m = 0: no singular expansion needed below C^0 (S = c0)", file=out)
        payload = {"expansion": exp.to_dict(), "note": "m = 0, S = c0"}
        _write_json(_out_dir(cfg) / "expansion.json", payload)
        return payload
    rec, ser = routes.recursion, routes.series
    Q = expand_Q(table, rec.pairs(), cfg.alpha, cfg.n, Exponent(rec.m + 1))
    print(f"m = {rec.m}   J = {rec.J}", file=out)
    print(f"{'j':>3} {'exponent':>10} {'i':>3} {'jα':>3} {'singular':>8} "
          f"{'c_j (recursion)':>22} {'c_j (series)':>22}", file=out)
    for index, (g, c_rec, c_ser) in enumerate(zip(rec.gammas, rec.coeffs, ser.coeffs), start=1):
        i, j = g.coords(cfg.alpha)
        flag = "yes" if index in rec.theta else "no"
        print(f"{index:>3} {str(g.value):>10} {i:>3} {j:>3} {flag:>8} "
              f"{fmt(c_rec):>22} {fmt(c_ser):>22}", file=out)
    print(f"max route discrepancy: {fmt(routes.max_discrepancy)}", file=out)
    print(f"max |Q - S| coefficient below m: {fmt(routes.residual_below_m)}", file=out)
    payload = {
        "expansion": rec.to_dict(),
        "routes": {
            "recursion": list(rec.coeffs),
            "series_match": list(ser.coeffs),
            "max_discrepancy": routes.max_discrepancy,
            "residual_below_m": routes.residual_below_m,
        },
        "Q": {"cutoff": str(rec.m + 1), "terms": Q.to_records()},
    }
    _write_json(_out_dir(cfg) / "expansion.json", payload)
    return payload


def cmd_check(cfg: ProblemConfig, out: Optional[TextIO] = None) -> dict:
    out = out or sys.stdout
    table, routes = _expansion(cfg)
    if routes is None:
        exp = trivial_expansion(cfg.c0, cfg.alpha, cfg.n)
    else:
        exp = routes.recursion
    tol = cfg.tolerances
    report = check_smoothness(
        table, exp, zero_tol=tol.zero, route_tol=tol.route, derivative_tol=tol.derivative_zero
    )
    print(f"m = {exp.m}", file=out)
    if report.condition_holds:
        print(f"d^i/dx^i f(0, c0) = 0 for all i < {exp.m}: solution is C^{exp.m} near 0", file=out)
    else:
        i = report.first_violating_i
        print(f"condition fails at i = {i}: d^{i}/dx^{i} f(0, c0) = "
              f"{fmt(table.entry(i, 0))}", file=out)
    for g, c in report.singular_coeffs:
        print(f"  singular term x^{g.value}: {fmt(c)}", file=out)
    payload = {"alpha": _alpha_dict(cfg.alpha), "m": exp.m, **report.to_dict()}
    _write_json(_out_dir(cfg) / "check.json", payload)
    return payload


def _reference_fn(cfg: ProblemConfig) -> Optional[Callable[[float], float]]:
    ref = cfg.solver.reference
    if ref.kind == "mittag_leffler":
        return lambda x: ref.scale * mittag_leffler(cfg.alpha, ref.rate * x ** float(cfg.alpha))
    if ref.kind == "expression":
        expr = parse(ref.expr)
        return lambda x: evaluate(expr, x, 0.0)
    return None


def _modes(cfg: ProblemConfig) -> list[Mode]:
    if cfg.solver.mode == "both":
        return [Mode.DIRECT, Mode.REGULARIZED]
    return [Mode(cfg.solver.mode)]


def _solve_config(cfg: ProblemConfig, mode: Mode, exp: Optional[SingularExpansion]) -> SolveConfig:
    s = cfg.solver
    return SolveConfig(
        alpha=cfg.alpha,
        c0=cfg.c0,
        t_end=s.t_end,
        steps=s.steps,
        mode=mode,
        expansion=exp if mode is Mode.REGULARIZED else None,
        corrector_iterations=s.corrector_iterations,
        bound=cfg.b,
    )


def _singular_expansion(cfg: ProblemConfig) -> SingularExpansion:
    _, routes = _expansion(cfg)
    return routes.recursion if routes else trivial_expansion(cfg.c0, cfg.alpha, cfg.n)


def _warn_interval(cfg: ProblemConfig) -> None:
    M = estimate_bound_M(cfg.expr, cfg.n, cfg.a, cfg.c0, cfg.b, cfg.bound_grid)
    if M > 0:
        hs = h_star(cfg.alpha, cfg.a, cfg.b, M)
        if cfg.solver.t_end > hs:
            log.warning("t_end=%s exceeds the estimated existence interval h*=%s", cfg.solver.t_end, fmt(hs))


def cmd_solve(cfg: ProblemConfig, out: Optional[TextIO] = None) -> dict:
    out = out or sys.stdout
    _warn_interval(cfg)
    exp = _singular_expansion(cfg)
    reference = _reference_fn(cfg)
    if cfg.solver.reference.kind == "fine":
        log.info("reference kind 'fine' only applies to the order command; no error column")
    written = {}
    for mode in _modes(cfg):
        scfg = _solve_config(cfg, mode, exp)
        if mode is Mode.REGULARIZED and cfg.solver.handoff is not None:
            result = solve_handoff(scfg, cfg.expr, cfg.solver.handoff)
        else:
            result = solve(scfg, cfg.expr)
        S = result.S if result.S is not None else np.asarray(
            [exp.c0 + sum(c * x ** float(g.value) for g, c in exp.pairs()) for x in result.x]
        )
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for k, x in enumerate(result.x):
            z = None if result.z is None else float(result.z[k])
            err = None if reference is None else abs(float(result.y[k]) - reference(float(x)))
            writer.writerow([k, fmt(float(x)), fmt(float(result.y[k])), fmt(z), fmt(float(S[k])), fmt(err)])
        path = _out_dir(cfg) / f"solution_{mode.value}.csv"
        path.write_text(buf.getvalue())
        line = f"{mode.value:>12}: y({fmt(float(result.x[-1]))}) = {fmt(result.final)}"
        if reference is not None:
            line += f"   |error| = {fmt(abs(result.final - reference(float(result.x[-1]))))}"
        print(line, file=out)
        written[mode.value] = {"path": str(path), "final": result.final}
    return written


def cmd_order(cfg: ProblemConfig, out: Optional[TextIO] = None) -> dict:
    out = out or sys.stdout
    exp = _singular_expansion(cfg)
    ref_fn = _reference_fn(cfg)
    reference = "fine" if ref_fn is None else ref_fn(cfg.solver.t_end)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("mode", "steps", "error", "order"))
    reports = {}
    for mode in _modes(cfg):
        rep = estimate_order(
            cfg.expr,
            _solve_config(cfg, mode, exp),
            reference,
            levels=cfg.order_levels,
            fine_factor=cfg.fine_factor,
        )
        for index, (steps, err) in enumerate(zip(rep.steps, rep.errors)):
            order = None if index == 0 else rep.orders[index - 1]
            writer.writerow((mode.value, steps, fmt(err), fmt(order)))
            print(f"{mode.value:>12} N={steps:<7} error={fmt(err):<24} order={fmt(order)}", file=out)
        reports[mode.value] = rep
    (_out_dir(cfg) / "order.csv").write_text(buf.getvalue())
    return reports


def cmd_hstar(cfg: ProblemConfig, out: Optional[TextIO] = None) -> dict:
    out = out or sys.stdout
    M = estimate_bound_M(cfg.expr, cfg.n, cfg.a, cfg.c0, cfg.b, cfg.bound_grid)
    payload: dict = {"alpha": _alpha_dict(cfg.alpha), "M_estimate": M, "grid": cfg.bound_grid}
    print(f"M (sampled on a {cfg.bound_grid}x{cfg.bound_grid} grid, lower estimate) = {fmt(M)}", file=out)
    if M == 0.0:
        hs = cfg.a
        print("all derivatives vanish on the sample: h* = a", file=out)
    else:
        hs = h_star(cfg.alpha, cfg.a, cfg.b, M)
    payload["h_star"] = hs
    print(f"h* = {fmt(hs)}", file=out)
    if cfg.theorem is not None:
        table, routes = _expansion(cfg)
        if routes is not None:
            exp = routes.recursion
            th = cfg.theorem
            norm = norm_QS_prime(table, exp, hs)
            budget = TheoremBudget(th.C0, th.C1, th.K, hs, norm, exp.m, cfg.alpha)
            h_ok = largest_admissible_h(
                th.K, th.C0, th.C1, exp.m, cfg.alpha, lambda h: norm_QS_prime(table, exp, h), hs
            )
            payload["theorem"] = {
                "norm_QS_prime": norm,
                "lhs_at_h_star": budget_lhs(budget),
                "holds_at_h_star": theorem_budget_holds(budget),
                "largest_admissible_h": h_ok,
            }
            print(f"||(Q-S)'|| on [0, h*] = {fmt(norm)}; inequality at h*: "
                  f"{theorem_budget_holds(budget)}; largest admissible h = {fmt(h_ok)}", file=out)
    _write_json(_out_dir(cfg) / "hstar.json", payload)
    return payload


COMMANDS = {
    "expand": cmd_expand,
    "check": cmd_check,
    "solve": cmd_solve,
    "order": cmd_order,
    "hstar": cmd_hstar,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caputo-smooth",
        description="Singular expansions and regularized solvers for Caputo fractional ODEs.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="YAML problem configuration")
    parser.add_argument("--output", help="output directory (overrides the config)")
    parser.add_argument("--mode", choices=config_mod.MODES)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--t-end", dest="t_end", type=float)
    parser.add_argument("--f", help="right-hand side f(x, y)")
    parser.add_argument("--alpha", help="fractional order, 'p/q' or decimal")
    parser.add_argument("--c0", type=float)
    parser.add_argument("--n", type=int, help="smoothness order of f")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def load_config(args: argparse.Namespace) -> ProblemConfig:
    if args.config:
        cfg = config_mod.load(args.config)
    else:
        if args.f is None or args.alpha is None:
            raise ConfigError("either --config or both --f and --alpha are required")
        cfg = config_mod.from_mapping({"f": args.f, "alpha": args.alpha})
    return config_mod.with_overrides(
        cfg,
        f=args.f,
        alpha=args.alpha,
        c0=args.c0,
        n=args.n,
        output=args.output,
        mode=args.mode,
        steps=args.steps,
        t_end=args.t_end,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        cfg = load_config(args)
        print(f"alpha = {cfg.alpha} ({fmt(float(cfg.alpha))})")
        COMMANDS[args.command](cfg)
    except CaputoSmoothError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
