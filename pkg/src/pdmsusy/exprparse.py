"""Tiny recursive-descent parser for config expressions.

Grammar (usual precedence, ^ binds tightest and right-associative):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ('+'|'-') factor | power
    power  := atom ('^' factor)?
    atom   := number | name | name '(' expr ')' | '(' expr ')'

`name` is the declared variable, 'i'/'j' for the imaginary unit, or one of
the primitive functions exp, ln, log, sqrt, sin, cos, sinh, cosh, tanh.
Integer exponents map to integer powers; anything else to the principal
branch.
"""

from __future__ import annotations

import re

from . import scalarfn
from .errors import SchemaError
from .scalarfn import Const, ScalarFunction, Var

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
                    r"|\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z_0-9]*)"
                    r"|(\*\*)|([-+*/^()]))")

_FUNCS = {
    "exp": scalarfn.exp,
    "ln": scalarfn.log,
    "log": scalarfn.log,
    "sqrt": scalarfn.sqrt,
    "sin": scalarfn.sin,
    "cos": scalarfn.cos,
    "sinh": scalarfn.sinh,
    "cosh": scalarfn.cosh,
    "tanh": scalarfn.tanh,
}


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise SchemaError(f"bad character in expression: {text[pos:]!r}")
        num, name, dstar, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        elif dstar is not None:
            out.append(("op", "^"))
        else:
            out.append(("op", op))
        pos = m.end()
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, tokens, variable: str):
        self.toks = tokens
        self.i = 0
        self.variable = variable

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        k, v = self.toks[self.i]
        if (kind and k != kind) or (value and v != value):
            raise SchemaError(f"unexpected token {v!r} in expression")
        self.i += 1
        return v

    def expr(self) -> ScalarFunction:
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take("op")
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self) -> ScalarFunction:
        node = self.factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.take("op")
            rhs = self.factor()
            node = node * rhs if op == "*" else node / rhs
        return node

    def factor(self) -> ScalarFunction:
        if self.peek() == ("op", "-"):
            self.take("op")
            return -self.factor()
        if self.peek() == ("op", "+"):
            self.take("op")
            return self.factor()
        return self.power()

    def power(self) -> ScalarFunction:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take("op")
            exponent = self.factor()
            if isinstance(exponent, Const):
                val = exponent.value
                if val.imag == 0 and float(val.real).is_integer():
                    return base ** int(val.real)
                return base ** val
            raise SchemaError("exponent must be a constant")
        return base

    def atom(self) -> ScalarFunction:
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return Const(float(val))
        if kind == "name":
            self.take()
            if val == self.variable:
                return Var()
            if val in ("i", "j"):
                return Const(1j)
            if val in _FUNCS:
                self.take("op", "(")
                arg = self.expr()
                self.take("op", ")")
                return _FUNCS[val](arg)
            raise SchemaError(
                f"unknown name {val!r} (variable is {self.variable!r})")
        if (kind, val) == ("op", "("):
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        raise SchemaError(f"unexpected token {val!r} in expression")


def parse_expression(text: str, variable: str) -> ScalarFunction:
    """Parse `text` into a ScalarFunction of the named variable."""
    if not isinstance(text, str) or not text.strip():
        raise SchemaError("expression must be a non-empty string")
    p = _Parser(_tokenize(text), variable)
    node = p.expr()
    if p.peek()[0] != "end":
        raise SchemaError(f"trailing input in expression {text!r}")
    return node
