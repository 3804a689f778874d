"""Parsing, evaluation and exact differentiation of expressions ``f(x, y)``."""

from .derivatives import DerivTable, derivative_table, estimate_bound_M, mixed_partial
from .jets import MAX_ORDER, Jet, expr_jet
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
    evaluate,
    free_variables,
    to_text,
)
from .parser import parse
from .symbolic import differentiate, differentiate_word

__all__ = [
    "Add",
    "Const",
    "DerivTable",
    "Div",
    "Expr",
    "Func",
    "Jet",
    "MAX_ORDER",
    "Mul",
    "Neg",
    "Pow",
    "Sub",
    "Var",
    "derivative_table",
    "differentiate",
    "differentiate_word",
    "estimate_bound_M",
    "evaluate",
    "expr_jet",
    "free_variables",
    "mixed_partial",
    "parse",
    "to_text",
]
