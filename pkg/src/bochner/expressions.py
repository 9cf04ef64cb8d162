"""Tiny expression grammar for interval-space targets.

Supported: real and complex literals (``2``, ``0.5``, ``3i``, ``i``), the
variable ``x``, ``+``, ``-``, ``*`` (also ``×``), integer powers ``x^k`` with
k <= 8, indicators ``ind(a,b)`` of [a, b) with 0 <= a < b <= 1 (dyadic
endpoints recommended), and parentheses.  Evaluation is vectorized over
numpy arrays of points.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ScenarioError

MAX_POWER = 8

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>i)?"
    r"|(?P<ident>[A-Za-z_]\w*)"
    r"|(?P<op>[-+*^(),×]))"
)


class Node:
    def evaluate(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Node):
    value: complex

    def evaluate(self, xs):
        return np.full(xs.shape, self.value, dtype=complex)


@dataclass(frozen=True)
class Var(Node):
    def evaluate(self, xs):
        return np.asarray(xs, dtype=complex)


@dataclass(frozen=True)
class Indicator(Node):
    a: float
    b: float

    def evaluate(self, xs):
        return ((xs >= self.a) & (xs < self.b)).astype(complex)


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, xs):
        lv = self.left.evaluate(xs)
        rv = self.right.evaluate(xs)
        if self.op == "+":
            return lv + rv
        if self.op == "-":
            return lv - rv
        return lv * rv


@dataclass(frozen=True)
class Neg(Node):
    inner: Node

    def evaluate(self, xs):
        return -self.inner.evaluate(xs)


@dataclass(frozen=True)
class Power(Node):
    base: Node
    exponent: int

    def evaluate(self, xs):
        return self.base.evaluate(xs) ** self.exponent


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ScenarioError(f"unexpected character {rest[0]!r} at column {pos}")
        if m.group("num") is not None:
            val = float(m.group("num"))
            out.append(("num", 1j * val if m.group("imag") else complex(val), pos))
        elif m.group("ident") is not None:
            out.append(("ident", m.group("ident"), pos))
        else:
            op = m.group("op")
            out.append(("op", "*" if op == "×" else op, pos))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ScenarioError(f"expected {op!r} at column {pos} in {self.text!r}")

    def fail(self, message):
        _, _, pos = self.peek()
        raise ScenarioError(f"{message} at column {pos} in {self.text!r}")

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("trailing input")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            _, op, _ = self.take()
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            node = Binary("*", node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or val.imag != 0 or val.real != int(val.real):
                raise ScenarioError(f"exponent must be an integer at column {pos}")
            k = int(val.real)
            if not 0 <= k <= MAX_POWER:
                raise ScenarioError(
                    f"exponent {k} outside [0, {MAX_POWER}] at column {pos}")
            node = Power(node, k)
        return node

    def number(self) -> float:
        sign = 1.0
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1.0
        kind, val, pos = self.take()
        if kind != "num" or val.imag != 0:
            raise ScenarioError(f"expected a real number at column {pos}")
        return sign * val.real

    def atom(self) -> Node:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(val)
        if kind == "ident":
            if val == "x":
                return Var()
            if val == "i":
                return Const(1j)
            if val == "ind":
                self.expect_op("(")
                a = self.number()
                self.expect_op(",")
                b = self.number()
                self.expect_op(")")
                if not (0.0 <= a < b <= 1.0):
                    raise ScenarioError(
                        f"ind({a}, {b}) needs 0 <= a < b <= 1 (column {pos})")
                return Indicator(a, b)
            raise ScenarioError(f"unknown identifier {val!r} at column {pos}")
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ScenarioError(f"unexpected token at column {pos} in {self.text!r}")


def parse_expression(text: str) -> Node:
    """Parse one scalar expression."""
    if not isinstance(text, str) or not text.strip():
        raise ScenarioError("expression must be a nonempty string")
    return _Parser(text).parse()


def expression_evaluator(components: list[Node]):
    """Vectorized evaluator stacking one column per component expression."""

    def ev(xs):
        xs = np.asarray(xs, dtype=float)
        return np.stack([c.evaluate(xs) for c in components], axis=1)

    return ev
