"""A small arithmetic expression language for scalar fields on R^6.

Variables x1..x6, real constants, ``pi``, the operators ``+ - * /``,
unary minus, ``^`` with an integer exponent, and the functions sin, cos,
exp.  Binding from loosest to tightest: ``+ -``, ``* /``, ``^``, unary
minus -- so ``-x2^2`` is ``(-x2)^2``.  Whitespace is insignificant.
Syntax errors carry the 0-based offset of the offending token.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

__all__ = [
    "BinOp",
    "Call",
    "EvalError",
    "Expr",
    "ExprSyntaxError",
    "Neg",
    "Num",
    "Pow",
    "Var",
    "evaluate",
    "free_variables",
    "parse_expr",
]

_FUNCTIONS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}
_VARIABLES = {f"x{i}" for i in range(1, 7)}
_CONSTANTS = {"pi": math.pi}


class ExprSyntaxError(ValueError):
    """Syntax error with the byte offset of the first offending token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.raw_message = message
        self.position = position


class EvalError(ValueError):
    """Evaluation failure (division by ~0, overflow)."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # "x1".."x6"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class _Token:
    kind: str  # num | name | op | end
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def match_op(self, *ops: str) -> _Token | None:
        tok = self.peek()
        if tok.kind == "op" and tok.text in ops:
            return self.advance()
        return None

    def expect_op(self, op: str) -> None:
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            raise ExprSyntaxError(f"expected {op!r}", tok.pos)
        self.advance()

    # grammar: sum -> term (('+'|'-') term)*
    def parse_sum(self) -> Expr:
        node = self.parse_term()
        while True:
            tok = self.match_op("+", "-")
            if tok is None:
                return node
            node = BinOp(tok.text, node, self.parse_term())

    def parse_term(self) -> Expr:
        node = self.parse_power()
        while True:
            tok = self.match_op("*", "/")
            if tok is None:
                return node
            node = BinOp(tok.text, node, self.parse_power())

    def parse_power(self) -> Expr:
        base = self.parse_unary()
        tok = self.match_op("^")
        if tok is None:
            return base
        exp_tok = self.peek()
        exponent = self.parse_unary()
        if not isinstance(exponent, Num) or exponent.value != int(exponent.value):
            raise ExprSyntaxError("exponent must be an integer constant", exp_tok.pos)
        return Pow(base, int(exponent.value))

    def parse_unary(self) -> Expr:
        tok = self.match_op("-")
        if tok is not None:
            arg = self.parse_unary()
            if isinstance(arg, Num):
                return Num(-arg.value)
            return Neg(arg)
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if self.match_op("("):
                if tok.text not in _FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {tok.text!r}", tok.pos)
                arg = self.parse_sum()
                comma = self.peek()
                if comma.kind == "op" and comma.text == ",":
                    raise ExprSyntaxError(
                        f"{tok.text} takes exactly one argument", comma.pos
                    )
                self.expect_op(")")
                return Call(tok.text, arg)
            if tok.text in _VARIABLES:
                return Var(tok.text)
            if tok.text in _CONSTANTS:
                return Num(_CONSTANTS[tok.text])
            raise ExprSyntaxError(f"unknown identifier {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.parse_sum()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"expected a value, found {tok.text!r}", tok.pos)


def parse_expr(text: str) -> Expr:
    """Parse ``text`` into an expression tree."""
    parser = _Parser(_tokenize(text))
    node = parser.parse_sum()
    tail = parser.peek()
    if tail.kind != "end":
        raise ExprSyntaxError(f"unexpected trailing input {tail.text!r}", tail.pos)
    return node


def free_variables(expr: Expr) -> frozenset[str]:
    """The set of variable names appearing syntactically in the tree."""
    if isinstance(expr, Var):
        return frozenset((expr.name,))
    if isinstance(expr, Num):
        return frozenset()
    if isinstance(expr, Neg):
        return free_variables(expr.arg)
    if isinstance(expr, Call):
        return free_variables(expr.arg)
    if isinstance(expr, Pow):
        return free_variables(expr.base)
    return free_variables(expr.left) | free_variables(expr.right)


def evaluate(expr: Expr, point: Sequence[float]) -> float:
    """Evaluate at a point of R^6 (index i of x_i selects point[i-1])."""
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Var):
        return float(point[int(expr.name[1:]) - 1])
    if isinstance(expr, Neg):
        return -evaluate(expr.arg, point)
    if isinstance(expr, Pow):
        base = evaluate(expr.base, point)
        try:
            return base**expr.exponent
        except (ZeroDivisionError, OverflowError) as exc:
            raise EvalError(f"cannot raise {base!r} to {expr.exponent}: {exc}") from None
    if isinstance(expr, Call):
        value = evaluate(expr.arg, point)
        try:
            return _FUNCTIONS[expr.func](value)
        except (OverflowError, ValueError) as exc:
            raise EvalError(f"{expr.func}({value!r}) failed: {exc}") from None
    left = evaluate(expr.left, point)
    right = evaluate(expr.right, point)
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    if expr.op == "*":
        return left * right
    if abs(right) < 1e-300:
        raise EvalError(f"division by {right!r}")
    return left / right
