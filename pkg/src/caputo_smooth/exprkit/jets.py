"""Truncated bivariate Taylor arithmetic (forward-mode differentiation).

A :class:`Jet` of order ``n`` at a point ``(x0, y0)`` stores the normalized
Taylor coefficients ``t[p, q] = d^p/dx^p d^q/dy^q f(x0, y0) / (p! q!)`` for
``p + q <= n``.  Propagating jets through an expression tree yields every
mixed partial of total order ``<= n`` at once, exact up to rounding.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from ..errors import DepthExceededError, MathDomainError
from .nodes import (
    Add,
    Const,
    Div,
    Expr,
    Func,
    Mul,
    Neg,
    Pow,
    Sub,
    Var,
    constant_value,
)

#: Largest total differentiation order supported by :func:`expr_jet`.
MAX_ORDER = 24


def _mask(order: int) -> np.ndarray:
    p, q = np.indices((order + 1, order + 1))
    return (p + q) <= order


class Jet:
    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: np.ndarray, order: int) -> None:
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def constant(cls, value: float, order: int) -> "Jet":
        coeffs = np.zeros((order + 1, order + 1))
        coeffs[0, 0] = value
        return cls(coeffs, order)

    @classmethod
    def variable(cls, value: float, axis: int, order: int) -> "Jet":
        jet = cls.constant(value, order)
        if order >= 1:
            jet.coeffs[(1, 0) if axis == 0 else (0, 1)] = 1.0
        return jet

    @property
    def value(self) -> float:
        return float(self.coeffs[0, 0])

    def partial(self, p: int, q: int) -> float:
        return float(self.coeffs[p, q]) * math.factorial(p) * math.factorial(q)

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(self.coeffs + other.coeffs, self.order)

    def __sub__(self, other: "Jet") -> "Jet":
        return Jet(self.coeffs - other.coeffs, self.order)

    def __neg__(self) -> "Jet":
        return Jet(-self.coeffs, self.order)

    def scale(self, factor: float) -> "Jet":
        return Jet(self.coeffs * factor, self.order)

    def __mul__(self, other: "Jet") -> "Jet":
        n = self.order
        a, b = self.coeffs, other.coeffs
        out = np.zeros_like(a)
        for p in range(n + 1):
            for q in range(n + 1 - p):
                if a[p, q] != 0.0:
                    out[p:, q:] += a[p, q] * b[: n + 1 - p, : n + 1 - q]
        out[~_mask(n)] = 0.0
        return Jet(out, n)

    def compose(self, taylor: Callable[[float, int], list[float]]) -> "Jet":
        """Apply a univariate ``g`` given its Taylor coefficients at ``value``.

        ``taylor(u0, n)`` returns ``[g(u0), g'(u0), g''(u0)/2!, ...]`` of
        length ``n + 1``.
        """
        n = self.order
        coeffs = taylor(self.value, n)
        delta = Jet(self.coeffs.copy(), n)
        delta.coeffs[0, 0] = 0.0
        out = Jet.constant(coeffs[0], n)
        power = Jet.constant(1.0, n)
        for k in range(1, n + 1):
            power = power * delta
            if coeffs[k] != 0.0:
                out = out + power.scale(coeffs[k])
        return out

    def powi(self, k: int) -> "Jet":
        if k < 0:
            return self.reciprocal().powi(-k)
        result = Jet.constant(1.0, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def reciprocal(self) -> "Jet":
        if self.value == 0.0:
            raise MathDomainError("division by zero")
        return self.compose(lambda u, n: [(-1.0) ** k / u ** (k + 1) for k in range(n + 1)])


def _binomial_series(r: float) -> Callable[[float, int], list[float]]:
    def taylor(u: float, n: int) -> list[float]:
        if u <= 0.0:
            raise MathDomainError(f"non-integer power {r} not differentiable at {u}")
        out, coef = [], 1.0
        for k in range(n + 1):
            out.append(coef * u ** (r - k))
            coef *= (r - k) / (k + 1)
        return out

    return taylor


def _exp_series(u: float, n: int) -> list[float]:
    try:
        e = math.exp(u)
    except OverflowError:
        raise MathDomainError(f"exp({u}) overflows") from None
    return [e / math.factorial(k) for k in range(n + 1)]


def _sin_series(u: float, n: int) -> list[float]:
    cycle = (math.sin(u), math.cos(u), -math.sin(u), -math.cos(u))
    return [cycle[k % 4] / math.factorial(k) for k in range(n + 1)]


def _cos_series(u: float, n: int) -> list[float]:
    cycle = (math.cos(u), -math.sin(u), -math.cos(u), math.sin(u))
    return [cycle[k % 4] / math.factorial(k) for k in range(n + 1)]


def _log_series(u: float, n: int) -> list[float]:
    if u <= 0.0:
        raise MathDomainError(f"log of non-positive value {u}")
    return [math.log(u)] + [(-1.0) ** (k + 1) / (k * u**k) for k in range(1, n + 1)]


_FUNCTION_SERIES = {
    "exp": _exp_series,
    "sin": _sin_series,
    "cos": _cos_series,
    "log": _log_series,
    "sqrt": _binomial_series(0.5),
}


def expr_jet(expr: Expr, x: float, y: float, order: int) -> Jet:
    """Propagate an order-``order`` jet through ``expr`` at ``(x, y)``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    if order > MAX_ORDER:
        raise DepthExceededError(f"derivative order {order} exceeds supported depth {MAX_ORDER}")
    cache: dict[int, Jet] = {}

    def walk(node: Expr) -> Jet:
        key = id(node)
        if key in cache:
            return cache[key]
        if isinstance(node, Const):
            jet = Jet.constant(node.value, order)
        elif isinstance(node, Var):
            jet = Jet.variable(x if node.name == "x" else y, 0 if node.name == "x" else 1, order)
        elif isinstance(node, Neg):
            jet = -walk(node.arg)
        elif isinstance(node, Add):
            jet = walk(node.left) + walk(node.right)
        elif isinstance(node, Sub):
            jet = walk(node.left) - walk(node.right)
        elif isinstance(node, Mul):
            jet = walk(node.left) * walk(node.right)
        elif isinstance(node, Div):
            jet = walk(node.left) * walk(node.right).reciprocal()
        elif isinstance(node, Pow):
            r = constant_value(node.exponent)
            base = walk(node.base)
            if r == int(r):
                jet = base.powi(int(r))
            else:
                jet = base.compose(_binomial_series(r))
        elif isinstance(node, Func):
            jet = walk(node.arg).compose(_FUNCTION_SERIES[node.name])
        else:
            raise TypeError(f"not an expression node: {node!r}")
        if not np.all(np.isfinite(jet.coeffs)):
            raise MathDomainError(f"non-finite derivative at (x, y) = ({x}, {y})")
        cache[key] = jet
        return jet

    return walk(expr)
