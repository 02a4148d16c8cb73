"""A small expression language for candidate operations.

    expr   := term (('+' | '-') term)*
    term   := factor ('^' factor)*
    factor := rational '*' factor
            | 'x' INT '*' factor
            | 'd' '(' expr ')'
            | 'w' INT
            | 'x' INT
            | '(' expr ')'

``^`` is the wedge product and both binary operators associate to the left.
``x3 * f`` multiplies by the coordinate function x3 (a wedge with a 0-form),
which is how deliberately non-natural candidates are written.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .classify import NaturalOp, Signature
from .forms import DiffForm, ext_d, wedge
from .poly import Poly, format_fraction

__all__ = [
    "FormVar",
    "Coord",
    "D",
    "Wedge",
    "Add",
    "Scale",
    "ExprNode",
    "ParseError",
    "BindError",
    "parse_expr",
    "render",
    "grade_of",
    "bind",
]


@dataclass(frozen=True)
class FormVar:
    index: int


@dataclass(frozen=True)
class Coord:
    index: int


@dataclass(frozen=True)
class D:
    child: "ExprNode"


@dataclass(frozen=True)
class Wedge:
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Add:
    left: "ExprNode"
    right: "ExprNode"


@dataclass(frozen=True)
class Scale:
    factor: Fraction
    child: "ExprNode"


ExprNode = Union[FormVar, Coord, D, Wedge, Add, Scale]


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        detail = f"{msg} at position {pos}"
        if text:
            detail += f"\n  {text}\n  {' ' * pos}^"
        super().__init__(detail)


class BindError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[wx])(?P<idx>\d+)|(?P<d>d)(?=\s*\()|(?P<op>[-+^*()]))"
)


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unknown token {text[start]!r}", start, text)
        start = m.start(m.lastgroup if m.lastgroup != "idx" else "var")
        if m.group("num"):
            toks.append(("num", Fraction(m.group("num")), start))
        elif m.group("var"):
            idx = int(m.group("idx"))
            if idx < 1:
                raise ParseError("indices start at 1", start, text)
            toks.append((m.group("var"), idx, start))
        elif m.group("d"):
            toks.append(("d", None, start))
        else:
            toks.append((m.group("op"), None, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "end" else repr(kind)
            got = "end of input" if tok[0] == "end" else repr(self.text[tok[2]:tok[2] + 1])
            raise ParseError(f"expected {want}, found {got}", tok[2], self.text)
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.term()
            node = Add(node, rhs if op == "+" else Scale(Fraction(-1), rhs))
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "^":
            self.take()
            node = Wedge(node, self.factor())
        return node

    def factor(self):
        kind, val, pos = self.peek()
        if kind == "-" and self.peek(1)[0] == "num":
            self.take()
            _, num, _ = self.take()
            self.take("*")
            return Scale(-num, self.factor())
        if kind == "num":
            self.take()
            self.take("*")
            return Scale(val, self.factor())
        if kind == "x":
            self.take()
            if self.peek()[0] == "*":
                self.take()
                return Wedge(Coord(val), self.factor())
            return Coord(val)
        if kind == "w":
            self.take()
            return FormVar(val)
        if kind == "d":
            self.take()
            self.take("(")
            inner = self.expr()
            self.take(")")
            return D(inner)
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        what = "end of input" if kind == "end" else repr(self.text[pos:pos + 1])
        raise ParseError(f"unexpected {what}", pos, self.text)


def parse_expr(text: str) -> ExprNode:
    p = _Parser(text)
    node = p.expr()
    p.take("end")
    return node


def _factor_str(node: ExprNode) -> str:
    s = render(node)
    return f"({s})" if isinstance(node, (Add, Wedge)) else s


def render(node: ExprNode) -> str:
    """Canonical text; ``parse_expr(render(e)) == e``."""
    if isinstance(node, FormVar):
        return f"w{node.index}"
    if isinstance(node, Coord):
        return f"x{node.index}"
    if isinstance(node, D):
        return f"d({render(node.child)})"
    if isinstance(node, Scale):
        return f"{format_fraction(node.factor)} * {_factor_str(node.child)}"
    if isinstance(node, Wedge):
        left = render(node.left) if isinstance(node.left, Wedge) else _factor_str(node.left)
        return f"{left} ^ {_factor_str(node.right)}"
    if isinstance(node, Add):
        left = render(node.left)
        r = node.right
        if isinstance(r, Scale) and r.factor == -1:
            return f"{left} - {_term_str(r.child)}"
        return f"{left} + {_term_str(r)}"
    raise TypeError(f"not an expression node: {node!r}")


def _term_str(node: ExprNode) -> str:
    s = render(node)
    return f"({s})" if isinstance(node, Add) else s


def grade_of(node: ExprNode, degrees: Sequence[int]) -> int:
    """Form degree of ``node`` given the degrees of w1..wk."""
    if isinstance(node, FormVar):
        if not 1 <= node.index <= len(degrees):
            raise BindError(f"w{node.index} is out of range for {len(degrees)} input form(s)")
        return degrees[node.index - 1]
    if isinstance(node, Coord):
        return 0
    if isinstance(node, D):
        return grade_of(node.child, degrees) + 1
    if isinstance(node, Scale):
        return grade_of(node.child, degrees)
    if isinstance(node, Wedge):
        return grade_of(node.left, degrees) + grade_of(node.right, degrees)
    if isinstance(node, Add):
        a, b = grade_of(node.left, degrees), grade_of(node.right, degrees)
        if a != b:
            raise BindError(
                f"cannot add a {a}-form and a {b}-form in {render(node)!r}"
            )
        return a
    raise TypeError(f"not an expression node: {node!r}")


def _evaluate(node: ExprNode, n: int, forms: Sequence[DiffForm]) -> DiffForm:
    if isinstance(node, FormVar):
        return forms[node.index - 1]
    if isinstance(node, Coord):
        # a coordinate beyond the ambient dimension reads as zero
        if node.index > n:
            return DiffForm.zero(n, 0)
        return DiffForm.function(Poly.var(n, node.index))
    if isinstance(node, D):
        return ext_d(_evaluate(node.child, n, forms))
    if isinstance(node, Scale):
        return _evaluate(node.child, n, forms).scale(node.factor)
    if isinstance(node, Wedge):
        return wedge(_evaluate(node.left, n, forms), _evaluate(node.right, n, forms))
    if isinstance(node, Add):
        return _evaluate(node.left, n, forms) + _evaluate(node.right, n, forms)
    raise TypeError(f"not an expression node: {node!r}")


def bind(node: ExprNode | str, sig: Signature) -> NaturalOp:
    """Turn an expression into an operation of the given signature."""
    if isinstance(node, str):
        node = parse_expr(node)
    q = grade_of(node, sig.source_degrees)
    if q != sig.target_degree:
        raise BindError(
            f"{render(node)!r} has degree {q}, signature asks for {sig.target_degree}"
        )
    return NaturalOp(
        sig.source_degrees,
        q,
        lambda n, forms: _evaluate(node, n, forms),
        render(node),
    )
