"""Singular expansion ``S(x) = c0 + sum_j c_j x^gamma_j`` and the smoothness
criterion built on it.

Two independent routes compute the coefficients:

* :func:`coefficients_by_recursion` evaluates the closed-form sum over
  derivative data and products of earlier coefficients;
* :func:`coefficients_by_series_match` expands the nested-integral series
  ``Q`` and reads ``c_j`` off as its coefficient at ``x^gamma_j``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import InconsistencyError, MathDomainError
from .exprkit import DerivTable
from .gpseries import GenSeries, beta_fn, expand_Q, gamma_fn
from .lattice import Alpha, Exponent, LatticeSummary, build_lattice

ZERO_TOL = 1e-12
ROUTE_TOL = 1e-10
DERIVATIVE_ZERO_TOL = 1e-14
NORM_SAMPLES = 256


@dataclass(frozen=True)
class SingularExpansion:
    c0: float
    alpha: Alpha
    n: int
    m: int
    gammas: tuple[Exponent, ...]
    coeffs: tuple[float, ...]
    theta: tuple[int, ...]
    provenance: str = "recursion"

    def __post_init__(self) -> None:
        if len(self.gammas) != len(self.coeffs):
            raise ValueError("gammas and coeffs must have the same length")

    @property
    def J(self) -> int:
        return len(self.gammas)

    def pairs(self) -> list[tuple[Exponent, float]]:
        return list(zip(self.gammas, self.coeffs))

    def singular_part(self) -> list[tuple[Exponent, float]]:
        return [(self.gammas[j - 1], self.coeffs[j - 1]) for j in self.theta]

    def as_series(self, include_c0: bool = False) -> GenSeries:
        items = [(g, c) for g, c in self.pairs()]
        if include_c0:
            items.append((Exponent(0), self.c0))
        return GenSeries.build(self.alpha, items)

    def to_dict(self) -> dict:
        terms = []
        for index, (g, c) in enumerate(self.pairs(), start=1):
            i, j = g.coords(self.alpha)
            terms.append(
                {
                    "i": i,
                    "j": j,
                    "exponent": float(g.value),
                    "exponent_exact": str(g.value),
                    "coefficient": c,
                    "singular": index in self.theta,
                }
            )
        return {
            "alpha": {"p": self.alpha.p, "q": self.alpha.q},
            "c0": self.c0,
            "n": self.n,
            "m": self.m,
            "J": self.J,
            "provenance": self.provenance,
            "terms": terms,
        }


def trivial_expansion(c0: float, alpha: Alpha, n: int) -> SingularExpansion:
    """``S = c0`` (used when ``m = 0``)."""
    lattice = build_lattice(alpha, n, allow_trivial=True)
    return SingularExpansion(c0, alpha, n, lattice.m, (), (), (), "trivial")


def eval_S(e: SingularExpansion, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise MathDomainError("S is only defined for x >= 0")
    out = np.full_like(x, e.c0)
    for g, c in e.pairs():
        out = out + c * np.power(x, float(g.value))
    return out if out.ndim else float(out)


def eval_S_prime(e: SingularExpansion, x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for g, c in e.pairs():
        if c == 0.0:
            continue
        if g.value < 1 and np.any(x <= 0):
            raise MathDomainError(f"S' is unbounded at 0 (term x^{g} with c={c})")
        out = out + c * float(g.value) * np.power(x, float(g.value - 1))
    return out if out.ndim else float(out)


def _check_inputs(table: DerivTable, lattice: LatticeSummary, alpha: Alpha, n: int) -> None:
    if table.n < n:
        raise ValueError(f"derivative table of order {table.n} is incomplete for n={n}")
    if lattice.alpha != alpha or lattice.n != n:
        raise ValueError("lattice was built for a different (alpha, n)")


def _multisets(
    values: Sequence[Fraction], size: int, target: Fraction, start: int = 0
) -> Iterator[tuple[int, ...]]:
    """Non-decreasing index tuples of length ``size`` whose values sum to ``target``."""
    if size == 0:
        if target == 0:
            yield ()
        return
    for i in range(start, len(values)):
        v = values[i]
        # values are increasing, so the remaining picks are at least v each
        if v * size > target:
            break
        for rest in _multisets(values, size - 1, target - v, i):
            yield (i,) + rest


def recursion_terms(
    table: DerivTable, lattice: LatticeSummary, alpha: Alpha, n: int, coeffs: Sequence[float], j: int
) -> list[tuple[int, int, tuple[int, ...], float]]:
    """Contributions ``(a, k, multiset, value)`` to the 0-based coefficient ``j``.

    A contribution pairs ``a`` differentiations in x and ``k`` in y with a
    multiset of earlier exponents such that ``a + alpha + sum = gamma_j``.
    The ``1/(a! prod mult!)`` factor is the Taylor normalization that comes
    out of summing the nested integrals over every ordering of the word.
    """
    values = [g.value for g in lattice.gammas[:j]]
    target_total = lattice.gammas[j].value - alpha.value
    a_alpha = float(alpha)
    out = []
    for s in range(n):
        for k in range(s + 1):
            a = s - k
            d = table.entry(a, k)
            if d == 0.0:
                continue
            target = target_total - a
            if target < 0:
                continue
            for multiset in _multisets(values, k, target):
                weight = beta_fn(a_alpha, 1.0 + a + float(target)) / gamma_fn(a_alpha)
                weight /= math.factorial(a)
                for mult in Counter(multiset).values():
                    weight /= math.factorial(mult)
                product = math.prod(coeffs[i] for i in multiset)
                out.append((a, k, multiset, weight * d * product))
    return out


def coefficients_by_recursion(
    table: DerivTable, lattice: LatticeSummary, alpha: Alpha, n: int
) -> SingularExpansion:
    """Closed-form coefficients, computed in increasing exponent order."""
    _check_inputs(table, lattice, alpha, n)
    coeffs: list[float] = []
    for j in range(lattice.J):
        terms = recursion_terms(table, lattice, alpha, n, coeffs, j)
        coeffs.append(math.fsum(t[-1] for t in terms))
    return SingularExpansion(
        table.c0, alpha, n, lattice.m, lattice.gammas, tuple(coeffs), lattice.theta, "recursion"
    )


def match_residual(Q: GenSeries, expansion: SingularExpansion) -> float:
    """Largest ``|coefficient|`` of ``Q - (S - c0)`` below exponent ``m``."""
    diff = (Q - expansion.as_series()).below(expansion.m)
    return max((abs(c) for _, c in diff), default=0.0)


def coefficients_by_series_match(
    table: DerivTable,
    lattice: LatticeSummary,
    alpha: Alpha,
    n: int,
    *,
    tol: float = ROUTE_TOL,
    method: str = "dp",
) -> tuple[SingularExpansion, GenSeries]:
    """Read ``c_j`` off the expansion of ``Q`` truncated at ``m``.

    The coefficient of ``x^gamma_j`` in ``Q`` depends only on ``c_1..c_{j-1}``,
    so one pass in increasing order fixes every coefficient.  Returns the
    expansion and the final ``Q`` (truncated at ``m``).
    """
    _check_inputs(table, lattice, alpha, n)
    coeffs = [0.0] * lattice.J
    cutoff = Exponent(lattice.m)
    for j, gamma in enumerate(lattice.gammas):
        Q = expand_Q(table, list(zip(lattice.gammas, coeffs)), alpha, n, cutoff, method=method)
        coeffs[j] = Q.coefficient(gamma)
    expansion = SingularExpansion(
        table.c0, alpha, n, lattice.m, lattice.gammas, tuple(coeffs), lattice.theta, "series-match"
    )
    Q = expand_Q(table, expansion.pairs(), alpha, n, cutoff, method=method)
    residual = match_residual(Q, expansion)
    if residual > tol:
        raise InconsistencyError(f"Q - S has a coefficient {residual:.3e} below exponent m")
    return expansion, Q


@dataclass(frozen=True)
class RouteComparison:
    recursion: SingularExpansion
    series: SingularExpansion
    Q: GenSeries
    max_discrepancy: float
    residual_below_m: float


def compute_expansion(
    table: DerivTable, alpha: Alpha, n: int, *, tol: float = ROUTE_TOL
) -> RouteComparison:
    """Run both routes and check they agree within ``tol`` per coefficient."""
    lattice = build_lattice(alpha, n)
    rec = coefficients_by_recursion(table, lattice, alpha, n)
    ser, Q = coefficients_by_series_match(table, lattice, alpha, n, tol=tol)
    gap = max((abs(a - b) for a, b in zip(rec.coeffs, ser.coeffs)), default=0.0)
    if gap > tol:
        raise InconsistencyError(f"recursion and series routes differ by {gap:.3e}")
    return RouteComparison(rec, ser, Q, gap, match_residual(Q, rec))


@dataclass(frozen=True)
class SmoothnessReport:
    condition_holds: bool
    first_violating_i: Optional[int]
    singular_coeffs: tuple[tuple[Exponent, float], ...]
    all_coeffs_zero: bool
    max_singular: float = 0.0

    def to_dict(self) -> dict:
        return {
            "condition_holds": self.condition_holds,
            "first_violating_i": self.first_violating_i,
            "all_coeffs_zero": self.all_coeffs_zero,
            "max_singular_coefficient": self.max_singular,
            "singular_coeffs": [
                {"exponent": float(g.value), "exponent_exact": str(g.value), "coefficient": c}
                for g, c in self.singular_coeffs
            ],
        }


def check_smoothness(
    table: DerivTable,
    expansion: SingularExpansion,
    *,
    zero_tol: float = ZERO_TOL,
    route_tol: float = ROUTE_TOL,
    derivative_tol: float = DERIVATIVE_ZERO_TOL,
) -> SmoothnessReport:
    """Decide whether ``d^i/dx^i f(0, c0) = 0`` for all ``i < m`` and compare
    the verdict with the singular coefficients.

    Raises :class:`InconsistencyError` if the verdict and the coefficients
    disagree, or if the condition holds but some coefficient is non-zero.
    """
    if table.c0 != expansion.c0 or table.n < expansion.n:
        raise ValueError("derivative table and expansion do not describe the same problem")
    first = next(
        (i for i in range(expansion.m) if abs(table.entry(i, 0)) > derivative_tol), None
    )
    holds = first is None
    singular = expansion.singular_part()
    max_singular = max((abs(c) for _, c in singular), default=0.0)
    max_all = max((abs(c) for c in expansion.coeffs), default=0.0)
    if holds != (max_singular <= route_tol):
        raise InconsistencyError(
            f"smoothness verdict {holds} contradicts max singular coefficient {max_singular:.3e}"
        )
    if holds and max_all > route_tol:
        raise InconsistencyError(f"condition holds but a coefficient is {max_all:.3e}")
    return SmoothnessReport(
        condition_holds=holds,
        first_violating_i=first,
        singular_coeffs=tuple((g, c) for g, c in singular if abs(c) > zero_tol),
        all_coeffs_zero=max_all <= zero_tol,
        max_singular=max_singular,
    )


def h_star(alpha: Alpha, a: float, b: float, M: float) -> float:
    """Length of the guaranteed existence interval
    ``min(a, (b Gamma(1+alpha) / M)^(1/alpha))``."""
    if not (a > 0 and b > 0 and M > 0):
        raise MathDomainError("h_star requires positive a, b and M")
    al = float(alpha)
    return min(a, (b * gamma_fn(1.0 + al) / M) ** (1.0 / al))


@dataclass(frozen=True)
class TheoremBudget:
    C0: float
    C1: float
    K: float
    h: float
    norm_QS_prime: float
    m: int
    alpha: Alpha


def budget_lhs(t: TheoremBudget) -> float:
    ha = t.h ** float(t.alpha)
    return t.norm_QS_prime + t.C1 * ha + t.C0 * ha * sum(t.K**j for j in range(1, t.m + 1))


def theorem_budget_holds(t: TheoremBudget) -> bool:
    return budget_lhs(t) <= t.K


def smooth_remainder(Q: GenSeries, expansion: SingularExpansion, *, tol: float = ROUTE_TOL) -> GenSeries:
    """``Q - S + c0`` with the (numerically zero) terms below ``m`` removed."""
    diff = Q - expansion.as_series()
    residual = max((abs(c) for _, c in diff.below(expansion.m)), default=0.0)
    if residual > tol:
        raise InconsistencyError(f"Q - S has a coefficient {residual:.3e} below exponent m")
    return diff.at_least(expansion.m)


def norm_QS_prime(
    table: DerivTable, expansion: SingularExpansion, h: float, samples: int = NORM_SAMPLES
) -> float:
    """Sampled ``max_{1<=i<=m} sup_[0,h] |(Q - S)^(i)|`` on ``samples`` points.

    ``Q`` is expanded without truncation, so the series is exact.
    """
    Q = expand_Q(table, expansion.pairs(), expansion.alpha, expansion.n, None)
    rest = smooth_remainder(Q, expansion)
    xs = np.linspace(0.0, h, samples)
    best = 0.0
    for _ in range(expansion.m):
        rest = rest.differentiate()
        best = max(best, float(np.max(np.abs(rest(xs)))))
    return best


def largest_admissible_h(
    K: float,
    C0: float,
    C1: float,
    m: int,
    alpha: Alpha,
    norm: Union[float, Callable[[float], float]],
    h_max: float,
    *,
    iterations: int = 60,
) -> float:
    """Largest ``h`` in ``(0, h_max]`` for which the budget inequality holds,
    found by bisection (the left-hand side increases with ``h``).

    Returns 0.0 if even arbitrarily small ``h`` fails.
    """
    norm_at = norm if callable(norm) else (lambda _h: norm)

    def ok(h: float) -> bool:
        return theorem_budget_holds(TheoremBudget(C0, C1, K, h, norm_at(h), m, alpha))

    if ok(h_max):
        return h_max
    lo, hi = 0.0, h_max
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo
