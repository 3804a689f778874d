"""Finite generalized power series over lattice exponents.

A :class:`GenSeries` is ``sum a_e x^e`` with exact rational exponents and
floating coefficients.  The integration rules below are exactly what is needed
to expand the nested integrals

    Q(x) = sum_{s<n} sum_{beta in {1,2}^s} d_beta f(0, c0) / Gamma(alpha)
           * int_0^x (x - t0)^(alpha-1) int_0^t0 w_1 ... int_0^t_{s-1} w_s

where ``w_k = 1`` for ``beta_k = 1`` and ``w_k = S'(t_k)`` for ``beta_k = 2``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import MathDomainError
from .exprkit import DerivTable
from .lattice import Alpha, Exponent

ExponentLike = Union[Exponent, Fraction, int]


def gamma_fn(x: float) -> float:
    """Gamma function for positive arguments."""
    if not x > 0:
        raise MathDomainError(f"gamma_fn requires a positive argument, got {x}")
    return math.gamma(x)


def beta_fn(a: float, b: float) -> float:
    """Beta function ``Gamma(a) Gamma(b) / Gamma(a + b)``, via log-gamma."""
    if not (a > 0 and b > 0):
        raise MathDomainError(f"beta_fn requires positive arguments, got ({a}, {b})")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def gamma_ratio(a: float, shift: float) -> float:
    """``Gamma(a) / Gamma(a + shift)`` for ``a > 0``, ``shift >= 0``."""
    if a + shift < 170.0:
        return math.gamma(a) / math.gamma(a + shift)
    return math.exp(math.lgamma(a) - math.lgamma(a + shift))


def _as_exponent(e: ExponentLike) -> Exponent:
    return e if isinstance(e, Exponent) else Exponent(Fraction(e))


@dataclass(frozen=True)
class GenSeries:
    """Truncated generalized power series ``sum terms[e] * x**e``.

    ``cutoff=None`` disables truncation.  Terms whose exponent exceeds the
    cutoff are dropped; :attr:`truncated` records whether that ever happened.
    Only exact zero coefficients are pruned.
    """

    alpha: Alpha
    terms: Mapping[Exponent, float] = field(default_factory=dict)
    cutoff: Optional[Exponent] = None
    truncated: bool = False

    @classmethod
    def build(
        cls,
        alpha: Alpha,
        items: Iterable[tuple[ExponentLike, float]],
        cutoff: Optional[ExponentLike] = None,
        truncated: bool = False,
    ) -> "GenSeries":
        limit = None if cutoff is None else _as_exponent(cutoff)
        terms: dict[Exponent, float] = {}
        for e, c in items:
            e = _as_exponent(e)
            if limit is not None and e > limit:
                truncated = truncated or c != 0.0
                continue
            terms[e] = terms.get(e, 0.0) + float(c)
        terms = {e: c for e, c in sorted(terms.items()) if c != 0.0}
        return cls(alpha, terms, limit, truncated)

    @classmethod
    def one(cls, alpha: Alpha, cutoff: Optional[ExponentLike] = None) -> "GenSeries":
        return cls.build(alpha, [(Exponent(0), 1.0)], cutoff)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def coefficient(self, e: ExponentLike) -> float:
        return self.terms.get(_as_exponent(e), 0.0)

    def exponents(self) -> list[Exponent]:
        return list(self.terms)

    def _derived(self, items, cutoff=...) -> "GenSeries":
        return GenSeries.build(
            self.alpha, items, self.cutoff if cutoff is ... else cutoff, self.truncated
        )

    def with_cutoff(self, cutoff: Optional[ExponentLike]) -> "GenSeries":
        return self._derived(self.terms.items(), None if cutoff is None else _as_exponent(cutoff))

    def __add__(self, other: "GenSeries") -> "GenSeries":
        return self._derived(itertools.chain(self.terms.items(), other.terms.items()))

    def __sub__(self, other: "GenSeries") -> "GenSeries":
        return self._derived(
            itertools.chain(self.terms.items(), ((e, -c) for e, c in other.terms.items()))
        )

    def scale(self, factor: float) -> "GenSeries":
        if factor == 0.0:
            return self._derived([])
        return self._derived((e, c * factor) for e, c in self.terms.items())

    def below(self, limit: ExponentLike) -> "GenSeries":
        """Terms with exponent strictly below ``limit``."""
        limit = _as_exponent(limit)
        return self._derived((e, c) for e, c in self.terms.items() if e < limit)

    def at_least(self, limit: ExponentLike) -> "GenSeries":
        limit = _as_exponent(limit)
        return self._derived((e, c) for e, c in self.terms.items() if e >= limit)

    def differentiate(self) -> "GenSeries":
        """Formal derivative ``a x^e -> a e x^(e-1)``."""
        return self._derived((e - 1, c * float(e.value)) for e, c in self.terms.items())

    def __call__(self, x):
        """Evaluate at a scalar or array of points ``x >= 0``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        with np.errstate(divide="ignore"):
            for e, c in self.terms.items():
                out = out + c * np.power(x, float(e.value))
        return out if out.ndim else float(out)

    def to_records(self) -> list[dict]:
        records = []
        for e, c in self.terms.items():
            i, j = e.coords(self.alpha)
            records.append({"i": i, "j": j, "exponent_value": float(e.value), "coefficient": c})
        return records


@dataclass(frozen=True)
class SingularWeight:
    """``S'(x) = sum gamma_j c_j x^(gamma_j - 1)`` stored as ``(gamma_j, c_j)``."""

    pairs: tuple[tuple[Exponent, float], ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[ExponentLike, float]]) -> "SingularWeight":
        return cls(tuple((_as_exponent(g), float(c)) for g, c in pairs))

    def terms(self) -> list[tuple[Exponent, float]]:
        return [(g - 1, float(g.value) * c) for g, c in self.pairs if c != 0.0]


def integrate(s: GenSeries) -> GenSeries:
    """``int_0^x``: ``a x^e -> a/(e+1) x^(e+1)``."""
    items = []
    for e, c in s.terms.items():
        if e.value <= -1:
            raise MathDomainError(f"cannot integrate x^{e} from 0")
        items.append((e + 1, c / float(e.value + 1)))
    return s._derived(items)


def mul_weight(s: GenSeries, w: SingularWeight) -> GenSeries:
    weight = w.terms()
    return s._derived(
        (e + g, c * wc) for e, c in s.terms.items() for g, wc in weight
    )


def frac_integrate(s: GenSeries, alpha: Alpha) -> GenSeries:
    """Riemann-Liouville integral of order ``alpha``:
    ``a x^e -> a Gamma(e+1)/Gamma(e+1+alpha) x^(e+alpha)``."""
    items = []
    a = float(alpha)
    for e, c in s.terms.items():
        if e.value <= -1:
            raise MathDomainError(f"cannot integrate x^{e} from 0")
        items.append((e + alpha.value, c * gamma_ratio(float(e.value) + 1.0, a)))
    return s._derived(items)


def _nested_level_series(
    n: int, alpha: Alpha, weight: SingularWeight, cutoff: Optional[Exponent]
) -> list[list[GenSeries]]:
    """``levels[s][k]``: sum of the nested integrals over all words of length
    ``s`` containing ``k`` letters 2 (before the outer fractional integral).

    Built innermost-out by prepending an outer letter to every shorter word.
    """
    levels = [[GenSeries.one(alpha, cutoff)]]
    for s in range(1, n):
        prev = levels[-1]
        row = []
        for k in range(s + 1):
            acc = GenSeries.build(alpha, [], cutoff)
            if k < s:
                acc = acc + integrate(prev[k])
            if k > 0:
                acc = acc + integrate(mul_weight(prev[k - 1], weight))
            row.append(acc)
        levels.append(row)
    return levels


def nested_series(
    table: DerivTable,
    expansion_coeffs: Sequence[tuple[ExponentLike, float]],
    alpha: Alpha,
    n: int,
    cutoff: Optional[ExponentLike] = None,
) -> GenSeries:
    """The integrand series ``G`` with ``Q = frac_integrate(G)`` (no 1/Gamma
    factor is missing: :func:`frac_integrate` carries it)."""
    cutoff = None if cutoff is None else _as_exponent(cutoff)
    weight = SingularWeight.from_pairs(expansion_coeffs)
    levels = _nested_level_series(n, alpha, weight, cutoff)
    total = GenSeries.build(alpha, [], cutoff)
    for s, row in enumerate(levels):
        for k, series in enumerate(row):
            d = table.entry(s - k, k)
            if d != 0.0:
                total = total + series.scale(d)
    return total


def _enumerated_Q(table, weight, alpha, n, cutoff) -> GenSeries:
    total = GenSeries.build(alpha, [], cutoff)
    for s in range(n):
        for word in itertools.product((1, 2), repeat=s):
            d = table.word(word)
            if d == 0.0:
                continue
            g = GenSeries.one(alpha, cutoff)
            for letter in reversed(word):
                g = integrate(g) if letter == 1 else integrate(mul_weight(g, weight))
            total = total + frac_integrate(g, alpha).scale(d)
    return total


def expand_Q(
    table: DerivTable,
    expansion_coeffs: Sequence[tuple[ExponentLike, float]],
    alpha: Alpha,
    n: int,
    cutoff: Optional[ExponentLike] = None,
    *,
    method: str = "dp",
) -> GenSeries:
    """Expand ``Q`` into a generalized series truncated at ``cutoff``.

    ``method="dp"`` groups derivative words by their number of letters 2,
    which determines the derivative factor; ``method="enumerate"`` walks all
    ``2**s`` words one by one and serves as the reference.
    """
    if table.n < n - 1:
        raise ValueError(f"derivative table of order {table.n} is too short for n={n}")
    cutoff = None if cutoff is None else _as_exponent(cutoff)
    if method == "enumerate":
        return _enumerated_Q(table, SingularWeight.from_pairs(expansion_coeffs), alpha, n, cutoff)
    if method != "dp":
        raise ValueError(f"unknown method {method!r}")
    inner = nested_series(table, expansion_coeffs, alpha, n, cutoff)
    return frac_integrate(inner, alpha)
