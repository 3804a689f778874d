"""Mixed partial derivatives, derivative tables and the derivative bound."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .jets import expr_jet
from .nodes import Expr, evaluate

DEFAULT_BOUND_GRID = 33


def mixed_partial(f: Expr, p: int, q: int, x: float, y: float) -> float:
    """``d^p/dx^p d^q/dy^q f`` at ``(x, y)``, computed with Taylor jets."""
    if p < 0 or q < 0:
        raise ValueError("derivative orders must be non-negative")
    if p == q == 0:
        return evaluate(f, x, y)
    return expr_jet(f, x, y, p + q).partial(p, q)


@dataclass(frozen=True)
class DerivTable:
    """All partials ``d_x^p d_y^q f(0, c0)`` with ``p + q <= n``.

    A derivative word with ``k`` letters "2" out of ``s`` maps to the entry
    ``(s - k, k)``.
    """

    n: int
    c0: float
    entries: Mapping[tuple[int, int], float]

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self.entries[key]

    def entry(self, p: int, q: int) -> float:
        return self.entries[(p, q)]

    def word(self, word: tuple[int, ...]) -> float:
        k = sum(1 for letter in word if letter == 2)
        return self.entries[(len(word) - k, k)]

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.entries.values())

    @classmethod
    def from_entries(cls, n: int, c0: float, entries: Mapping[tuple[int, int], float]) -> "DerivTable":
        full = {(p, s - p): 0.0 for s in range(n + 1) for p in range(s + 1)}
        for key, value in entries.items():
            if key not in full:
                raise ValueError(f"entry {key} outside total order {n}")
            full[key] = float(value)
        return cls(n, float(c0), MappingProxyType(full))


def derivative_table(f: Expr, n: int, c0: float) -> DerivTable:
    if n < 1:
        raise ValueError("n must be a positive integer")
    jet = expr_jet(f, 0.0, c0, n)
    entries = {(p, s - p): jet.partial(p, s - p) for s in range(n + 1) for p in range(s + 1)}
    # the constant entry must match plain evaluation bit for bit
    entries[(0, 0)] = evaluate(f, 0.0, c0)
    return DerivTable(n, float(c0), MappingProxyType(entries))


def estimate_bound_M(
    f: Expr, n: int, a: float, c0: float, b: float, grid: int = DEFAULT_BOUND_GRID
) -> float:
    """Sampled estimate of the uniform bound on all partials of order ``<= n``.

    The maximum is taken over a ``grid x grid`` tensor grid of
    ``[0, a] x [c0 - b, c0 + b]`` (corners included), so the result is a
    lower estimate of the true supremum.
    """
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if grid < 2:
        raise ValueError("grid must be at least 2")
    best = 0.0
    for x in np.linspace(0.0, a, grid):
        for y in np.linspace(c0 - b, c0 + b, grid):
            jet = expr_jet(f, float(x), float(y), n)
            values = [abs(jet.partial(p, s - p)) for s in range(n + 1) for p in range(s + 1)]
            best = max(best, max(values))
    return best
