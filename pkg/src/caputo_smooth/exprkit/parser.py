"""Recursive-descent parser for the expression grammar.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | "+" unary | power ;
    power   = primary [ "^" unary ] ;          (* right associative *)
    primary = number | "x" | "y" | "pi" | "e"
            | name "(" expr ")" | "(" expr ")" ;
    name    = "sin" | "cos" | "exp" | "log" | "sqrt" ;
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
            | "." digits [ exponent ] ;

``**`` is accepted as a synonym of ``^``.  Exponents must be constant.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..errors import ExprSyntaxError
from .nodes import (
    FUNCTIONS,
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
    free_variables,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),])
    """,
    re.VERBOSE,
)

_CONSTANTS = {"pi": math.pi, "e": math.e}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(source):
        match = _TOKEN.match(source, pos)
        if match is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos, source)
        kind = match.lastgroup
        if kind != "ws":
            text = match.group()
            tokens.append(Token("op" if kind == "op" else kind, "^" if text == "**" else text, pos))
        pos = match.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str) -> None:
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def error(self, message: str, token: Token | None = None) -> ExprSyntaxError:
        token = token or self.current
        return ExprSyntaxError(message, token.pos, self.source)

    def accept(self, text: str) -> bool:
        if self.current.kind == "op" and self.current.text == text:
            self.index += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.current.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def parse(self) -> Expr:
        if self.current.kind == "end":
            raise self.error("empty expression")
        expr = self.expr()
        if self.current.kind != "end":
            raise self.error(f"unexpected {self.current.text!r}")
        return expr

    def expr(self) -> Expr:
        node = self.term()
        while True:
            if self.accept("+"):
                node = Add(node, self.term())
            elif self.accept("-"):
                node = Sub(node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            if self.accept("*"):
                node = Mul(node, self.unary())
            elif self.accept("/"):
                node = Div(node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        token = self.current
        if self.accept("^"):
            exponent = self.unary()
            if free_variables(exponent):
                raise self.error("exponent must be constant", token)
            return Pow(base, exponent)
        return base

    def primary(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Const(float(token.text))
        if token.kind == "name":
            self.advance()
            if token.text in ("x", "y"):
                return Var(token.text)
            if token.text in _CONSTANTS:
                return Const(_CONSTANTS[token.text])
            if token.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(token.text, arg)
            raise self.error(f"unknown identifier {token.text!r}", token)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if token.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {token.text!r}")


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree.

    >>> parse("x^2*y")
    Mul(left=Pow(base=Var(name='x'), exponent=Const(value=2.0)), right=Var(name='y'))
    """
    if not isinstance(source, str):
        raise TypeError("expression source must be a string")
    return _Parser(source).parse()
