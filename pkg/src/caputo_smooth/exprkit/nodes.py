"""Expression tree for bivariate real functions ``f(x, y)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from ..errors import MathDomainError

VARIABLES = ("x", "y")
FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")


class Expr:
    """Base class of all expression nodes.

    Nodes are frozen dataclasses, so structural equality and hashing come for
    free and trees can be shared between threads.
    """

    __slots__ = ()

    def __call__(self, x: float, y: float) -> float:
        return evaluate(self, x, y)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __post_init__(self) -> None:
        if self.name not in VARIABLES:
            raise ValueError(f"unknown variable {self.name!r}")


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    """``base ^ exponent``; the exponent never depends on ``x`` or ``y``."""

    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self) -> None:
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


Binary = Union[Add, Sub, Mul, Div]

_BINARY_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def free_variables(expr: Expr) -> frozenset[str]:
    if isinstance(expr, Const):
        return frozenset()
    if isinstance(expr, Var):
        return frozenset((expr.name,))
    if isinstance(expr, (Neg, Func)):
        return free_variables(expr.arg)
    if isinstance(expr, Pow):
        return free_variables(expr.base) | free_variables(expr.exponent)
    return free_variables(expr.left) | free_variables(expr.right)


def constant_value(expr: Expr) -> float:
    """Evaluate an expression that does not depend on ``x`` or ``y``."""
    if free_variables(expr):
        raise ValueError("expression is not constant")
    return evaluate(expr, 0.0, 0.0)


def _check(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise MathDomainError(f"{what} produced a non-finite value")
    return value


def real_power(base: float, exponent: float) -> float:
    if exponent == int(exponent) and abs(exponent) < 2**31:
        k = int(exponent)
        if base == 0.0 and k < 0:
            raise MathDomainError("division by zero in power with negative exponent")
        return _check(base**k, "power")
    if base < 0.0:
        raise MathDomainError(f"non-integer power {exponent} of negative base {base}")
    if base == 0.0 and exponent < 0.0:
        raise MathDomainError("zero raised to a negative power")
    return _check(base**exponent, "power")


def apply_function(name: str, u: float) -> float:
    if name == "sin":
        return math.sin(u)
    if name == "cos":
        return math.cos(u)
    if name == "exp":
        try:
            return math.exp(u)
        except OverflowError:
            raise MathDomainError(f"exp({u}) overflows") from None
    if name == "log":
        if u <= 0.0:
            raise MathDomainError(f"log of non-positive value {u}")
        return math.log(u)
    if name == "sqrt":
        if u < 0.0:
            raise MathDomainError(f"sqrt of negative value {u}")
        return math.sqrt(u)
    raise ValueError(f"unknown function {name!r}")


def evaluate(expr: Expr, x: float, y: float) -> float:
    """Value of ``expr`` at ``(x, y)``.

    Raises :class:`~caputo_smooth.errors.MathDomainError` for a log of a
    non-positive number, a division by zero or a non-finite intermediate.
    """
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return x if expr.name == "x" else y
    if isinstance(expr, Neg):
        return -evaluate(expr.arg, x, y)
    if isinstance(expr, Add):
        return evaluate(expr.left, x, y) + evaluate(expr.right, x, y)
    if isinstance(expr, Sub):
        return evaluate(expr.left, x, y) - evaluate(expr.right, x, y)
    if isinstance(expr, Mul):
        return _check(evaluate(expr.left, x, y) * evaluate(expr.right, x, y), "product")
    if isinstance(expr, Div):
        den = evaluate(expr.right, x, y)
        if den == 0.0:
            raise MathDomainError(f"division by zero at (x, y) = ({x}, {y})")
        return _check(evaluate(expr.left, x, y) / den, "quotient")
    if isinstance(expr, Pow):
        return real_power(evaluate(expr.base, x, y), evaluate(expr.exponent, x, y))
    if isinstance(expr, Func):
        return apply_function(expr.name, evaluate(expr.arg, x, y))
    raise TypeError(f"not an expression node: {expr!r}")


def _fmt_number(value: float) -> str:
    text = repr(float(value))
    if text.endswith(".0"):
        text = text[:-2]
    return text


def to_text(expr: Expr) -> str:
    """Fully parenthesised text that parses back to an equal tree."""
    if isinstance(expr, Const):
        text = _fmt_number(expr.value)
        return f"({text})" if expr.value < 0 or "e" in text else text
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        return f"(-{to_text(expr.arg)})"
    if isinstance(expr, Func):
        return f"{expr.name}({to_text(expr.arg)})"
    if isinstance(expr, Pow):
        return f"({to_text(expr.base)}^{to_text(expr.exponent)})"
    symbol = _BINARY_SYMBOL[type(expr)]
    return f"({to_text(expr.left)}{symbol}{to_text(expr.right)})"
