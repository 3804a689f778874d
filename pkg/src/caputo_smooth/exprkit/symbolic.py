"""Symbolic differentiation of expression trees.

Used as an order-sensitive route for derivative words (differentiate in
``x`` then ``y`` then ``x`` ...); :mod:`.jets` is the production route.
"""

from __future__ import annotations

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

ZERO = Const(0.0)
ONE = Const(1.0)


def _is(node: Expr, value: float) -> bool:
    return isinstance(node, Const) and node.value == value


def _add(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return _neg(b)
    return Sub(a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    return Neg(a)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0):
        return ZERO
    if _is(b, 1.0):
        return a
    return Div(a, b)


def differentiate(expr: Expr, var: str) -> Expr:
    """Return the tree of ``d expr / d var``."""
    d = lambda node: differentiate(node, var)  # noqa: E731
    if isinstance(expr, Const):
        return ZERO
    if isinstance(expr, Var):
        return ONE if expr.name == var else ZERO
    if isinstance(expr, Neg):
        return _neg(d(expr.arg))
    if isinstance(expr, Add):
        return _add(d(expr.left), d(expr.right))
    if isinstance(expr, Sub):
        return _sub(d(expr.left), d(expr.right))
    if isinstance(expr, Mul):
        return _add(_mul(d(expr.left), expr.right), _mul(expr.left, d(expr.right)))
    if isinstance(expr, Div):
        num = _sub(_mul(d(expr.left), expr.right), _mul(expr.left, d(expr.right)))
        return _div(num, Pow(expr.right, Const(2.0)))
    if isinstance(expr, Pow):
        r = constant_value(expr.exponent)
        if r == 0.0:
            return ZERO
        inner = d(expr.base)
        lowered = ONE if r == 1.0 else Pow(expr.base, Const(r - 1.0))
        return _mul(_mul(Const(r), lowered), inner)
    if isinstance(expr, Func):
        u, du = expr.arg, d(expr.arg)
        if expr.name == "sin":
            outer = Func("cos", u)
        elif expr.name == "cos":
            outer = Neg(Func("sin", u))
        elif expr.name == "exp":
            outer = expr
        elif expr.name == "log":
            outer = Div(ONE, u)
        else:  # sqrt
            outer = Div(Const(0.5), expr)
        return _mul(outer, du)
    raise TypeError(f"not an expression node: {expr!r}")


def differentiate_word(expr: Expr, word: tuple[int, ...]) -> Expr:
    """Apply ``d/dx`` (letter 1) or ``d/dy`` (letter 2) in the order of ``word``."""
    for letter in word:
        expr = differentiate(expr, "x" if letter == 1 else "y")
    return expr
