"""Arithmetic expressions in ``t`` for forcing terms.

Grammar (``^`` binds tighter than unary minus and is right associative)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := primary ("^" unary)?
    primary := NUMBER | "t" | "pi" | "e" | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Functions: ``cos sin tan cosh sinh tanh exp ln sqrt abs arctan`` (one
argument), ``pow(x, p)``, ``bump(eps)`` = ``12 t (eps - t)`` on ``[0, eps]``
and zero elsewhere, ``step(t1, t2)`` = 1 on ``[t1, t2]`` and zero elsewhere.
The arguments of ``bump`` and ``step`` must not depend on ``t``.

Besides evaluation, the parser records where the forcing stops being
smooth: edges of ``bump``/``step`` and kinks of ``abs`` as breakpoints, and
zeros of the base of a negative power or of a logarithm's argument as
singular points.  The last two are recognized when the argument is affine
in ``t`` (``t``, ``3*t - 1``, ``abs(t - 2)``, ...).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidInputError
from .quadrature import Forcing


class ExpressionError(InvalidInputError):
    """Syntax or name error in a forcing expression, with the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))")

UNARY_FUNCS = {
    "cos": np.cos, "sin": np.sin, "tan": np.tan,
    "cosh": np.cosh, "sinh": np.sinh, "tanh": np.tanh,
    "exp": np.exp, "ln": np.log, "sqrt": np.sqrt,
    "abs": np.abs, "arctan": np.arctan,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
ARITY = {**{name: 1 for name in UNARY_FUNCS}, "pow": 2, "bump": 1, "step": 2}


@dataclass(frozen=True)
class Node:
    kind: str  # num, var, neg, bin, call
    offset: int
    value: float = 0.0
    op: str = ""
    args: tuple = ()

    def depends_on_t(self) -> bool:
        return self.kind == "var" or any(arg.depends_on_t() for arg in self.args)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = len(text) - len(text[pos:].lstrip())
            raise ExpressionError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, offset = self.take()
        if text != value or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise ExpressionError(f"expected {value!r}, found {found}", offset)

    def parse(self) -> Node:
        node = self.expr()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {text!r}", offset)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, offset = self.take()
            node = Node("bin", offset, op=op, args=(node, self.term()))
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, offset = self.take()
            node = Node("bin", offset, op=op, args=(node, self.unary()))
        return node

    def unary(self) -> Node:
        kind, text, offset = self.peek()
        if kind == "op" and text in ("+", "-"):
            self.take()
            inner = self.unary()
            return inner if text == "+" else Node("neg", offset, args=(inner,))
        return self.power()

    def power(self) -> Node:
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            _, _, offset = self.take()
            return Node("bin", offset, op="^", args=(base, self.unary()))
        return base

    def primary(self) -> Node:
        kind, text, offset = self.take()
        if kind == "num":
            return Node("num", offset, value=float(text))
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                return self.call(text, offset)
            if text == "t":
                return Node("var", offset)
            if text in CONSTANTS:
                return Node("num", offset, value=CONSTANTS[text])
            raise ExpressionError(f"unknown identifier {text!r}", offset)
        found = "end of input" if kind == "end" else repr(text)
        raise ExpressionError(f"expected a number, t, a function or '(', found {found}", offset)

    def call(self, name: str, offset: int) -> Node:
        if name not in ARITY:
            raise ExpressionError(f"unknown function {name!r}", offset)
        self.expect("(")
        args = [self.expr()]
        while self.peek()[0] == "op" and self.peek()[1] == ",":
            self.take()
            args.append(self.expr())
        self.expect(")")
        if len(args) != ARITY[name]:
            raise ExpressionError(f"{name} takes {ARITY[name]} argument(s), got {len(args)}", offset)
        if name in ("bump", "step"):
            for arg in args:
                if arg.depends_on_t():
                    raise ExpressionError(f"arguments of {name} must be constants", arg.offset)
        return Node("call", offset, op=name, args=tuple(args))


def _constant(node: Node) -> float:
    return float(_compile(node)(np.float64(0.0)))


def _compile(node: Node) -> Callable:
    if node.kind == "num":
        value = node.value
        return lambda t: np.full_like(t, value)
    if node.kind == "var":
        return lambda t: t
    if node.kind == "neg":
        inner = _compile(node.args[0])
        return lambda t: -inner(t)
    if node.kind == "bin":
        left, right = (_compile(arg) for arg in node.args)
        op = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide, "^": np.power}[node.op]
        return lambda t: op(left(t), right(t))
    name = node.op
    if name in UNARY_FUNCS:
        func = UNARY_FUNCS[name]
        inner = _compile(node.args[0])
        return lambda t: func(inner(t))
    if name == "pow":
        base, expo = (_compile(arg) for arg in node.args)
        return lambda t: np.power(base(t), expo(t))
    if name == "bump":
        eps = _constant(node.args[0])
        lo, hi = min(0.0, eps), max(0.0, eps)
        return lambda t: np.where((t >= lo) & (t <= hi), 12.0 * t * (eps - t), 0.0)
    t1, t2 = (_constant(arg) for arg in node.args)
    return lambda t: np.where((t >= t1) & (t <= t2), 1.0, 0.0)


def _affine(node: Node):
    """``(slope, intercept)`` if ``node`` is affine in ``t`` with constant coefficients."""
    if not node.depends_on_t():
        return 0.0, _constant(node)
    if node.kind == "var":
        return 1.0, 0.0
    if node.kind == "neg":
        inner = _affine(node.args[0])
        return None if inner is None else (-inner[0], -inner[1])
    if node.kind == "bin" and node.op in "+-*/":
        left, right = (_affine(arg) for arg in node.args)
        if left is None or right is None:
            return None
        if node.op == "+":
            return left[0] + right[0], left[1] + right[1]
        if node.op == "-":
            return left[0] - right[0], left[1] - right[1]
        if node.op == "*" and (left[0] == 0.0 or right[0] == 0.0):
            return left[0] * right[1] + right[0] * left[1], left[1] * right[1]
        if node.op == "/" and right[0] == 0.0 and right[1] != 0.0:
            return left[0] / right[1], left[1] / right[1]
    return None


def _zero_of(node: Node):
    """Zero of ``node`` or of the argument of an outer ``abs``, if affine and nonconstant."""
    if node.kind == "call" and node.op == "abs":
        node = node.args[0]
    line = _affine(node)
    if line is None or line[0] == 0.0:
        return None
    return -line[1] / line[0] + 0.0  # normalize -0.0


def _metadata(node: Node, breakpoints: set, singular: set):
    for arg in node.args:
        _metadata(arg, breakpoints, singular)
    if node.kind == "call" and node.op == "bump":
        eps = _constant(node.args[0])
        breakpoints.update({0.0, eps})
    elif node.kind == "call" and node.op == "step":
        breakpoints.update(_constant(arg) for arg in node.args)
    elif node.kind == "call" and node.op == "abs":
        zero = _zero_of(node.args[0])
        if zero is not None:
            breakpoints.add(zero)
    elif node.kind == "call" and node.op == "ln":
        zero = _zero_of(node.args[0])
        if zero is not None:
            singular.add(zero)
    elif (node.kind == "bin" and node.op == "^") or (node.kind == "call" and node.op == "pow"):
        base, expo = node.args
        if not expo.depends_on_t() and _constant(expo) < 0:
            zero = _zero_of(base)
            if zero is not None:
                singular.add(zero)


@dataclass(frozen=True)
class ForcingExpr:
    source: str
    tree: Node = field(repr=False)
    breakpoints: tuple = ()
    singular_points: tuple = ()
    func: Callable = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.func is None:
            object.__setattr__(self, "func", _compile(self.tree))

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            out = self.func(arr)
        out = np.asarray(out, dtype=float)
        return out if out.ndim else float(out)

    def to_forcing(self) -> Forcing:
        return Forcing(self, self.breakpoints, self.singular_points, label=self.source)


def parse_forcing(text: str) -> ForcingExpr:
    """Parse ``text`` into an evaluable forcing with breakpoint metadata.

    >>> f = parse_forcing("bump(1)")
    >>> f.breakpoints, f(0.5)
    ((0.0, 1.0), 3.0)
    """
    if not isinstance(text, str):
        raise InvalidInputError("forcing expression must be a string")
    tree = _Parser(text).parse()
    breakpoints: set = set()
    singular: set = set()
    with np.errstate(all="ignore"):
        _metadata(tree, breakpoints, singular)
    for value in breakpoints | singular:
        if not math.isfinite(value):
            raise ExpressionError("breakpoint is not finite", 0)
    return ForcingExpr(text, tree, tuple(sorted(breakpoints - singular)), tuple(sorted(singular)))
