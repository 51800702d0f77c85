"""
app/expr_parser.py
------------------
Arithmetic expression language for metric components.

Grammar (binding power, highest first):
    ^            right-associative
    unary -
    * /          left-associative
    + -          left-associative
    atoms: real literals, coordinates x1..xn, f(expr) for f in
           exp, log, sin, cos, sqrt, parenthesized expressions

"2*-x1" parses as 2*(-x1); "-x1^2" as -(x1^2); "2^-x1" as 2^(-x1).

Parsing is top-down operator precedence: every token has a prefix handler
(nud) and, when it can continue an expression, an infix handler (led) with a
left binding power.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterator, Union

from geometry.errors import DomainError

from .errors import ExprSyntaxError
from .options import FUNCTIONS


# ============================================================
# =                          AST                              =
# ============================================================

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int          # 1-based coordinate index


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]


# ============================================================
# =                        TOKENIZER                          =
# ============================================================

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)

_COORD = re.compile(r"x([1-9][0-9]*)$")


@dataclass(frozen=True)
class Token:
    kind: str       # num | name | op | end
    text: str
    offset: int


def tokenize(src: str) -> Iterator[Token]:
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos, "number, name or operator", src)
        if m.lastgroup != "ws":
            yield Token(m.lastgroup, m.group(), pos)
        pos = m.end()
    yield Token("end", "", len(src))


# ============================================================
# =                    PRATT PARSER                           =
# ============================================================

BP_ADD = 10
BP_MUL = 20
BP_UNARY = 25
BP_POW = 30

_INFIX_BP = {"+": BP_ADD, "-": BP_ADD, "*": BP_MUL, "/": BP_MUL, "^": BP_POW}


class _Parser:
    def __init__(self, src: str, dim: int | None):
        self.src = src
        self.dim = dim
        self.tokens = list(tokenize(src))
        self.index = 0
        self.token = self.tokens[0]

    def advance(self) -> Token:
        # the end token is sticky: nud reports it as a missing operand
        current = self.token
        self.index = min(self.index + 1, len(self.tokens) - 1)
        self.token = self.tokens[self.index]
        return current

    def expect(self, text: str) -> None:
        if self.token.text != text or self.token.kind != "op":
            raise ExprSyntaxError(f"unexpected {self._describe(self.token)}", self.token.offset, repr(text), self.src)
        self.advance()

    @staticmethod
    def _describe(tok: Token) -> str:
        return "end of input" if tok.kind == "end" else repr(tok.text)

    def expression(self, rbp: int = 0) -> Expr:
        left = self.nud(self.advance())
        while rbp < self._lbp(self.token):
            op = self.advance()
            left = self.led(op, left)
        return left

    def _lbp(self, tok: Token) -> int:
        if tok.kind == "op":
            return _INFIX_BP.get(tok.text, 0)
        return 0

    def nud(self, tok: Token) -> Expr:
        if tok.kind == "num":
            value = float(tok.text)
            if not math.isfinite(value):
                raise ExprSyntaxError(f"literal {tok.text} overflows", tok.offset, "finite number", self.src)
            return Num(value)
        if tok.kind == "name":
            return self._name(tok)
        if tok.kind == "op" and tok.text == "-":
            return Neg(self.expression(BP_UNARY))
        if tok.kind == "op" and tok.text == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        raise ExprSyntaxError(f"unexpected {self._describe(tok)}", tok.offset, "operand", self.src)

    def led(self, tok: Token, left: Expr) -> Expr:
        if tok.text == "^":
            # right-associative: bind the right side one notch looser
            return BinOp("^", left, self.expression(BP_POW - 1))
        return BinOp(tok.text, left, self.expression(_INFIX_BP[tok.text]))

    def _name(self, tok: Token) -> Expr:
        coord = _COORD.match(tok.text)
        if coord:
            index = int(coord.group(1))
            if self.dim is not None and index > self.dim:
                raise ExprSyntaxError(
                    f"coordinate {tok.text} not declared", tok.offset, f"x1..x{self.dim}", self.src
                )
            return Var(index)
        if tok.text in FUNCTIONS:
            self.expect("(")
            arg = self.expression()
            self.expect(")")
            return Call(tok.text, arg)
        raise ExprSyntaxError(
            f"unknown name {tok.text!r}", tok.offset, "coordinate x<k> or one of " + ", ".join(FUNCTIONS), self.src
        )

    def parse(self) -> Expr:
        expr = self.expression()
        if self.token.kind != "end":
            raise ExprSyntaxError(f"unexpected {self._describe(self.token)}", self.token.offset, "operator or end of input", self.src)
        return expr


def parse_expr(src: str, dim: int | None = None) -> Expr:
    """
    Parse src into an AST.

    Raises:
        ExprSyntaxError: with the offset of the offending token and what was expected.
    """
    if not isinstance(src, str):
        raise ExprSyntaxError(f"expression must be a string, got {type(src).__name__}", 0, "string")
    return _Parser(src, dim).parse()


# ============================================================
# =                   UNPARSE / EVALUATE                      =
# ============================================================

def unparse(expr: Expr) -> str:
    """Fully parenthesized source that reparses to an identical AST."""
    if isinstance(expr, Num):
        return repr(expr.value)
    if isinstance(expr, Var):
        return f"x{expr.index}"
    if isinstance(expr, Neg):
        return f"(-{unparse(expr.operand)})"
    if isinstance(expr, BinOp):
        return f"({unparse(expr.left)} {expr.op} {unparse(expr.right)})"
    if isinstance(expr, Call):
        return f"{expr.func}({unparse(expr.arg)})"
    raise TypeError(f"not an expression node: {expr!r}")


def variables(expr: Expr) -> set[int]:
    if isinstance(expr, Var):
        return {expr.index}
    if isinstance(expr, Neg):
        return variables(expr.operand)
    if isinstance(expr, BinOp):
        return variables(expr.left) | variables(expr.right)
    if isinstance(expr, Call):
        return variables(expr.arg)
    return set()


_BINARY: dict[str, Callable[[float, float], float]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "^": math.pow,
}

_FUNCS: dict[str, Callable[[float], float]] = {
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
    "sqrt": math.sqrt,
}


def _eval(expr: Expr, point) -> float:
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Var):
        return float(point[expr.index - 1])
    if isinstance(expr, Neg):
        return -_eval(expr.operand, point)
    if isinstance(expr, BinOp):
        return _BINARY[expr.op](_eval(expr.left, point), _eval(expr.right, point))
    return _FUNCS[expr.func](_eval(expr.arg, point))


def evaluate(expr: Expr, point) -> float:
    """
    Value at a point.

    Raises:
        DomainError: division by zero, log/sqrt outside their domain, overflow.
    """
    try:
        value = _eval(expr, point)
    except IndexError as exc:
        raise DomainError(point, f"expression uses x{max(variables(expr))} on a {len(point)}-d point") from exc
    except (ArithmeticError, ValueError) as exc:
        raise DomainError(point, f"{unparse(expr)}: {exc}") from exc
    if not math.isfinite(value):
        raise DomainError(point, f"{unparse(expr)}: non-finite value")
    return value


def compile_expr(expr: Expr) -> Callable:
    """Callable point -> float for use inside a Field."""
    return lambda p: evaluate(expr, p)
