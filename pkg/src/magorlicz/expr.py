"""A small arithmetic expression language for fields, potentials and densities.

Grammar (precedence climbing, lowest first)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' unary)?          # right associative
    primary := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'

Names are variables (``x1`` .. ``xn`` or ``t``), the constants ``pi``, ``e``
and the imaginary unit ``i``, or one of the functions in :data:`FUNCTIONS`.
Evaluation is vectorised over numpy arrays.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ParseError, PointEvaluationError

CONSTANTS = {"pi": np.pi, "e": np.e}


# name -> (arity, implementation)
FUNCTIONS = {
    "sin": (1, np.sin),
    "cos": (1, np.cos),
    "exp": (1, np.exp),
    "log": (1, np.log),
    "abs": (1, np.abs),
    "sqrt": (1, np.sqrt),
    "tanh": (1, np.tanh),
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    offset: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


# ---------------------------------------------------------------------------
# AST


class Node:
    """Base class of expression nodes."""

    def evaluate(self, env):
        raise NotImplementedError

    def is_complex(self) -> bool:
        return any(child.is_complex() for child in self.children())

    def children(self) -> Sequence["Node"]:
        return ()


@dataclass(frozen=True)
class Num(Node):
    value: float

    def evaluate(self, env):
        return self.value

    def __str__(self):
        return repr(self.value)


@dataclass(frozen=True)
class Const(Node):
    name: str

    def evaluate(self, env):
        return CONSTANTS[self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Imag(Node):
    def evaluate(self, env):
        return 1j

    def is_complex(self):
        return True

    def __str__(self):
        return "i"


@dataclass(frozen=True)
class Var(Node):
    name: str

    def evaluate(self, env):
        return env[self.name]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Unary(Node):
    op: str
    operand: Node

    def evaluate(self, env):
        v = self.operand.evaluate(env)
        return -v if self.op == "-" else v

    def children(self):
        return (self.operand,)

    def __str__(self):
        return f"({self.op}{self.operand})"


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            bad = np.asarray(b) == 0
            if np.any(bad):
                raise _located("division by zero", bad, env)
            return a / b
        # '^'
        return _power(a, b, env)

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call(Node):
    name: str
    args: tuple

    def evaluate(self, env):
        values = [arg.evaluate(env) for arg in self.args]
        z = values[0]
        if self.name == "log":
            bad = _nonpositive_real(z, strict=False)
            if np.any(bad):
                raise _located("log of nonpositive value", bad, env)
        elif self.name == "sqrt":
            bad = _nonpositive_real(z, strict=True)
            if np.any(bad):
                raise _located("sqrt of negative value", bad, env)
        return FUNCTIONS[self.name][1](*values)

    def children(self):
        return self.args

    def __str__(self):
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


def _nonpositive_real(z, strict):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        re_, im_ = z.real, z.imag
        return (im_ == 0) & ((re_ < 0) if strict else (re_ <= 0))
    return (z < 0) if strict else (z <= 0)


def _power(a, b, env):
    a_arr, b_arr = np.asarray(a), np.asarray(b)
    if not (np.iscomplexobj(a_arr) or np.iscomplexobj(b_arr)):
        frac = b_arr != np.round(b_arr)
        bad = (a_arr < 0) & frac
        if np.any(bad):
            raise _located("negative base with fractional exponent", bad, env)
    bad = (a_arr == 0) & (np.real(b_arr) < 0)
    if np.any(bad):
        raise _located("zero raised to a negative power", bad, env)
    with np.errstate(over="ignore"):
        return a ** b


def _located(message, bad, env):
    idx = np.argwhere(np.atleast_1d(bad))
    point = None
    if idx.size and env:
        first = tuple(idx[0])
        coords = []
        for name in sorted(env):
            v = np.atleast_1d(np.asarray(env[name]))
            try:
                coords.append(float(np.broadcast_to(v, np.atleast_1d(bad).shape)[first]))
            except ValueError:
                coords.append(float(v.flat[0]))
        point = tuple(coords) if len(coords) > 1 else coords[0]
    return PointEvaluationError(message, point)


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    BINARY = {"+": (1, "left"), "-": (1, "left"), "*": (2, "left"), "/": (2, "left"),
              "^": (4, "right")}
    UNARY_PREC = 3

    def __init__(self, src, variables):
        self.tokens = tokenize(src)
        self.pos = 0
        self.variables = frozenset(variables)

    @property
    def tok(self):
        return self.tokens[self.pos]

    def advance(self):
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, text):
        t = self.tok
        if t.kind != "op" or t.text != text:
            found = "end of input" if t.kind == "end" else repr(t.text)
            raise ParseError(f"expected {text!r}, found {found}", t.offset)
        return self.advance()

    def parse(self):
        node = self.expression(0)
        if self.tok.kind != "end":
            raise ParseError(f"unexpected token {self.tok.text!r}", self.tok.offset)
        return node

    def expression(self, min_prec):
        left = self.prefix()
        while self.tok.kind == "op" and self.tok.text in self.BINARY:
            prec, assoc = self.BINARY[self.tok.text]
            if prec < min_prec:
                break
            op = self.advance().text
            if op == "^":
                # exponent may carry its own sign: 2^-x
                right = self.expression(self.UNARY_PREC)
            else:
                right = self.expression(prec + 1 if assoc == "left" else prec)
            left = Binary(op, left, right)
        return left

    def prefix(self):
        t = self.tok
        if t.kind == "op" and t.text in "+-":
            self.advance()
            operand = self.expression(self.UNARY_PREC)
            return operand if t.text == "+" else Unary("-", operand)
        return self.primary()

    def primary(self):
        t = self.advance()
        if t.kind == "num":
            return Num(float(t.text))
        if t.kind == "name":
            return self.name(t)
        if t.kind == "op" and t.text == "(":
            node = self.expression(0)
            self.expect(")")
            return node
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"expected an operand, found {found}", t.offset)

    def name(self, t):
        if t.text in FUNCTIONS:
            arity = FUNCTIONS[t.text][0]
            self.expect("(")
            args = [self.expression(0)]
            while self.tok.kind == "op" and self.tok.text == ",":
                self.advance()
                args.append(self.expression(0))
            self.expect(")")
            if len(args) != arity:
                raise ParseError(
                    f"{t.text}() takes {arity} argument(s), got {len(args)}", t.offset)
            return Call(t.text, tuple(args))
        if t.text in self.variables:
            return Var(t.text)
        if t.text in CONSTANTS:
            return Const(t.text)
        if t.text == "i":
            return Imag()
        raise ParseError(f"unknown identifier {t.text!r}", t.offset)


def parse_expression(src: str, dimension: int | None = None,
                     variables: Sequence[str] | None = None) -> Node:
    """Parse ``src`` into an AST.

    Variables are ``x1 .. x{dimension}`` unless ``variables`` is given
    explicitly (Young densities use ``("t",)``).
    """
    if not src or not src.strip():
        raise ParseError("empty expression", 0)
    if variables is None:
        if dimension is None:
            raise ValueError("either dimension or variables is required")
        variables = tuple(f"x{k + 1}" for k in range(dimension))
    return _Parser(src, variables).parse()


def evaluate(node: Node, env: Mapping[str, np.ndarray]):
    """Evaluate ``node`` with variables bound to (broadcastable) arrays."""
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        value = node.evaluate(env)
    value = np.asarray(value)
    if not np.all(np.isfinite(value)):
        raise _located("non-finite value", ~np.isfinite(value), env)
    return value
