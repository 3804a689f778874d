"""Exact arithmetic on the exponent lattice ``{i + j*alpha : i, j >= 0}``.

``alpha = p/q`` is rational, so every lattice point is a rational number with
denominator ``q``.  Exponents are keyed by that reduced rational, which makes
collisions such as ``1 = 2 * (1/2)`` collapse to a single key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import ConfigError, TrivialLatticeError

#: Denominator bound used when converting a decimal alpha to a fraction.
MAX_DENOMINATOR = 10**6

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class Alpha:
    """Fractional order ``p/q`` with ``0 < p/q < 1`` in lowest terms."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.q <= 0 or self.p <= 0 or self.p >= self.q:
            raise ConfigError("alpha must lie in (0,1)")
        if math.gcd(self.p, self.q) != 1:
            raise ConfigError(f"alpha {self.p}/{self.q} is not in lowest terms")

    @classmethod
    def from_fraction(cls, value: Fraction) -> "Alpha":
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @classmethod
    def parse(cls, text: Union[str, float, Fraction]) -> "Alpha":
        """Read ``"p/q"`` exactly or a decimal via continued fractions.

        Decimals are approximated with denominator at most
        :data:`MAX_DENOMINATOR`.
        """
        if isinstance(text, Fraction):
            value = text
        else:
            raw = str(text).strip()
            try:
                if "/" in raw:
                    num, den = raw.split("/", 1)
                    value = Fraction(int(num), int(den))
                else:
                    value = Fraction(raw).limit_denominator(MAX_DENOMINATOR)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"cannot read alpha from {text!r}") from None
        if not 0 < value < 1:
            raise ConfigError("alpha must lie in (0,1)")
        return cls.from_fraction(value)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __float__(self) -> float:
        return self.p / self.q

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


@dataclass(frozen=True, order=True)
class Exponent:
    """A real exponent stored as an exact rational.

    Equality, hashing and ordering go through the rational value only, so two
    different ``(i, j)`` pairs naming the same number are the same key.
    """

    value: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    @classmethod
    def lattice(cls, i: int, j: int, alpha: Alpha) -> "Exponent":
        return cls(i + j * alpha.value)

    def coords(self, alpha: Alpha) -> tuple[int, int]:
        """Canonical ``(i, j)`` with ``value = i + j*alpha`` and ``0 <= j < q``.

        ``i`` may be negative for shifted exponents such as ``gamma - 1``.
        """
        scaled = self.value * alpha.q
        if scaled.denominator != 1:
            raise ValueError(f"{self.value} is not on the lattice of alpha={alpha}")
        # j*p = scaled (mod q)
        j = (int(scaled) * pow(alpha.p, -1, alpha.q)) % alpha.q if alpha.q > 1 else 0
        i = (int(scaled) - j * alpha.p) // alpha.q
        return i, j

    def is_integer(self) -> bool:
        return self.value.denominator == 1

    def __add__(self, other: Union["Exponent", Rational]) -> "Exponent":
        other_value = other.value if isinstance(other, Exponent) else Fraction(other)
        return Exponent(self.value + other_value)

    __radd__ = __add__

    def __sub__(self, other: Union["Exponent", Rational]) -> "Exponent":
        other_value = other.value if isinstance(other, Exponent) else Fraction(other)
        return Exponent(self.value - other_value)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return str(self.value)


def exponent_value(e: Exponent, alpha: Alpha | None = None) -> float:
    """Floating value of an exponent (``alpha`` is accepted for symmetry)."""
    return float(e.value)


@dataclass(frozen=True)
class LatticeSummary:
    """Regularity order ``m``, singular exponents ``gammas`` and ``theta``.

    ``theta`` holds 1-based indices of the non-integer exponents.
    """

    alpha: Alpha
    n: int
    m: int
    gammas: tuple[Exponent, ...]
    theta: tuple[int, ...]

    @property
    def J(self) -> int:
        return len(self.gammas)

    def is_singular(self, index: int) -> bool:
        """Whether the 1-based ``index`` belongs to ``theta``."""
        return index in self.theta


def regularity_order(alpha: Alpha, n: int) -> int:
    """Largest natural ``k`` with ``k < n*alpha``."""
    return math.ceil(n * alpha.value) - 1


def _lattice_points(alpha: Alpha, i_max: int, upper: Fraction, inclusive: bool, j_min: int = 0):
    points = set()
    for i in range(i_max + 1):
        j = j_min
        while True:
            v = i + j * alpha.value
            if v > upper or (v == upper and not inclusive):
                break
            if v > 0:
                points.add(Exponent(v))
            j += 1
    return points


def build_lattice(alpha: Alpha, n: int, *, allow_trivial: bool = False) -> LatticeSummary:
    """Compute ``m``, the singular exponents in ``(0, m)`` and ``theta``.

    Raises :class:`~caputo_smooth.errors.TrivialLatticeError` when ``m = 0``
    unless ``allow_trivial`` is set, in which case the empty summary is
    returned.
    """
    if not isinstance(alpha, Alpha):
        raise ConfigError("alpha must be an Alpha instance")
    if n < 1:
        raise ConfigError("n must be a positive integer")
    m = regularity_order(alpha, n)
    gammas = tuple(sorted(_lattice_points(alpha, m, Fraction(m), inclusive=False)))
    theta = tuple(k for k, g in enumerate(gammas, start=1) if not g.is_integer())
    summary = LatticeSummary(alpha, n, m, gammas, theta)
    if m == 0 and not allow_trivial:
        raise TrivialLatticeError(summary)
    return summary


def extended_lattice(alpha: Alpha, n: int, cutoff: Union[Exponent, Rational]) -> list[Exponent]:
    """Exponents ``i + j*alpha`` with ``i <= n-1``, ``j >= 1`` and value at
    most ``cutoff``, merged with the singular exponents of ``(alpha, n)``."""
    limit = cutoff.value if isinstance(cutoff, Exponent) else Fraction(cutoff)
    if limit <= 0:
        raise ValueError("cutoff must be positive")
    points = _lattice_points(alpha, n - 1, limit, inclusive=True, j_min=1)
    points.update(build_lattice(alpha, n, allow_trivial=True).gammas)
    return sorted(points)
