"""Parser and evaluator for the jetvar expression language.

Grammar (``&`` is accepted for ``∧``)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/' | '∧') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' INT)?
    atom    := NUMBER | NAME | NAME '[' word ']' | 'D' '[' word ']'
             | HEAD '(' expr (',' expr)* ')' | '(' expr ')'
             | '[' expr (',' expr)* ']'

Names are resolved against a :class:`JetSpace`: base coordinates (``x`` or
``x1 .. xn``), fibre coordinates (``u`` or ``u1 .. um``, optionally with an
index word), ``dx<k>``, ``du<i>[word]``, ``om<i>[word]`` and operator atoms
``D[word]``.  Index words are read by longest match of base names and are
multisets, so ``u[xyx]`` and ``u[xxy]`` are the same coordinate.

Heads: ``D(xk, e)``, ``d``, ``h``, ``v``, ``dbar``, ``A``, ``EL``, ``HLM``,
``TONTI``, ``ADJ``.

``/`` only divides by a non-zero rational.  ``^`` binds tighter than unary
minus, so ``-u^2`` is ``-(u^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import forms
from .cdiff import CDiffOp, adjoint, compose
from .forms import Covector, Form, from_du_basis
from .jetring import JetCoord, JetPoly, JetSpace
from .multiindex import MultiIndex
from .variational import SourceForm, euler_lagrange, helmholtz, tonti_lagrangian


class ParseError(ValueError):
    """Base class for input errors; ``pos`` is a 0-based character offset."""

    kind = "error"

    def __init__(self, message: str, pos: int | None = None, source: str | None = None):
        self.message = message
        self.pos = pos
        self.source = source
        super().__init__(self.describe())

    def describe(self) -> str:
        if self.pos is None:
            return f"{self.kind}: {self.message}"
        text = f"{self.kind} at position {self.pos}: {self.message}"
        if self.source is not None:
            text += f"\n  {self.source}\n  {' ' * self.pos}^"
        return text


class ExprSyntaxError(ParseError):
    kind = "syntax error"


class ExprTypeError(ParseError):
    """Well-formed input whose arity, shape or bidegree does not fit."""

    kind = "type error"


# -- tokens --------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, NAME, WORD, OP, END
    text: str
    pos: int


_OPS = {"+", "-", "*", "/", "^", "∧", "&", "(", ")", "[", "]", ","}


def tokenize(source: str) -> list[Token]:
    out: list[Token] = []
    k = 0
    while k < len(source):
        ch = source[k]
        if ch.isspace():
            k += 1
        elif ch.isdigit():
            j = k
            while j < len(source) and source[j].isdigit():
                j += 1
            out.append(Token("NUM", source[k:j], k))
            k = j
        elif ch.isalpha() or ch == "_":
            j = k
            while j < len(source) and (source[j].isalnum() or source[j] == "_"):
                j += 1
            out.append(Token("NAME", source[k:j], k))
            k = j
            if j < len(source) and source[j] == "[":
                close = source.find("]", j)
                if close < 0:
                    raise ExprSyntaxError("unclosed index word", j, source)
                out.append(Token("WORD", source[j + 1:close].strip(), j + 1))
                k = close + 1
        elif ch in _OPS:
            out.append(Token("OP", "∧" if ch == "&" else ch, k))
            k += 1
        else:
            raise ExprSyntaxError(f"unexpected character {ch!r}", k, source)
    out.append(Token("END", "", len(source)))
    return out


# -- AST -----------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: int


@dataclass(frozen=True)
class Name:
    name: str
    word: str | None
    pos: int
    word_pos: int | None = None


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Node"
    pos: int


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"
    pos: int


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int
    pos: int


@dataclass(frozen=True)
class Call:
    head: str
    args: tuple
    pos: int


@dataclass(frozen=True)
class ListLit:
    items: tuple
    pos: int


Node = Union[Num, Name, Unary, Binary, Power, Call, ListLit]

HEADS = {"D": 2, "d": 1, "h": 1, "v": 1, "dbar": 1, "A": 1, "EL": 1, "HLM": 1, "TONTI": 1, "ADJ": 1}


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.k = 0

    def peek(self) -> Token:
        return self.tokens[self.k]

    def take(self) -> Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> ExprSyntaxError:
        tok = tok or self.peek()
        return ExprSyntaxError(message, tok.pos, self.source)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "OP" or tok.text != text:
            found = "end of input" if tok.kind == "END" else repr(tok.text)
            raise self.error(f"expected {text!r}, found {found}")
        return self.take()

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "OP" and tok.text == text

    def parse(self) -> Node:
        if self.peek().kind == "END":
            raise self.error("empty expression")
        node = self.expr()
        if self.peek().kind != "END":
            raise self.error(f"unexpected {self.peek().text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.take()
            node = Binary(op.text, node, self.term(), op.pos)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.at("*") or self.at("/") or self.at("∧"):
            op = self.take()
            node = Binary(op.text, node, self.unary(), op.pos)
        return node

    def unary(self) -> Node:
        if self.at("-") or self.at("+"):
            op = self.take()
            return Unary(op.text, self.unary(), op.pos)
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.at("^"):
            op = self.take()
            tok = self.peek()
            if tok.kind != "NUM":
                raise self.error("exponent must be a non-negative integer")
            self.take()
            node = Power(node, int(tok.text), op.pos)
        return node

    def atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "NUM":
            self.take()
            return Num(Fraction(int(tok.text)), tok.pos)
        if tok.kind == "NAME":
            self.take()
            if self.peek().kind == "WORD":
                w = self.take()
                return Name(tok.text, w.text, tok.pos, w.pos)
            if tok.text in HEADS and self.at("("):
                self.take()
                args = [self.expr()]
                while self.at(","):
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                return Call(tok.text, tuple(args), tok.pos)
            return Name(tok.text, None, tok.pos)
        if self.at("("):
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if self.at("["):
            start = self.take()
            items = [self.expr()]
            while self.at(","):
                self.take()
                items.append(self.expr())
            self.expect("]")
            return ListLit(tuple(items), start.pos)
        if tok.kind == "END":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {tok.text!r}")


def parse(source: str) -> Node:
    """Parse ``source`` into an AST; raises :class:`ExprSyntaxError`."""
    return _Parser(source).parse()


# -- name resolution ---------------------------------------------------


class _Names:
    def __init__(self, space: JetSpace):
        self.space = space
        self.base = {name: k for k, name in enumerate(space.base_names)}
        for k in range(space.n):
            self.base.setdefault(f"x{k + 1}", k)
        self.fibre = {name: i for i, name in enumerate(space.fibre_names)}
        for i in range(space.m):
            self.fibre.setdefault(f"u{i + 1}", i)
        self.omega = {f"om{i + 1}": i for i in range(space.m)}
        if space.m == 1:
            self.omega["om"] = 0
        self.du = {f"d{name}": i for name, i in self.fibre.items()}
        self.dx = {f"d{name}": k for name, k in self.base.items()}
        self._by_length = sorted(self.base, key=len, reverse=True)

    def word(self, text: str, pos: int, source: str) -> MultiIndex:
        counts = [0] * self.space.n
        k = 0
        text = text.replace(" ", "")
        while k < len(text):
            for name in self._by_length:
                if text.startswith(name, k):
                    counts[self.base[name]] += 1
                    k += len(name)
                    break
            else:
                raise ExprSyntaxError(f"cannot read index word {text!r} at {text[k:]!r}", pos + k, source)
        return MultiIndex(counts)


# -- evaluation ------------------------------------------------------


Value = Union[JetPoly, Form, CDiffOp, SourceForm, tuple]


class _Row(list):
    """Matrix row holding operators; only valid inside a matrix literal."""


def _is_scalar(v) -> bool:
    return isinstance(v, JetPoly)


def _as_op(v, n: int) -> CDiffOp | None:
    if isinstance(v, CDiffOp):
        return v
    if isinstance(v, JetPoly):
        return CDiffOp.scalar(v, n)
    return None


class Evaluator:
    def __init__(self, space: JetSpace, source: str = ""):
        self.space = space
        self.source = source
        self.names = _Names(space)

    def fail(self, message: str, pos: int) -> ExprTypeError:
        return ExprTypeError(message, pos, self.source)

    def eval(self, node: Node) -> Value:
        method = getattr(self, f"_eval_{type(node).__name__.lower()}")
        return method(node)

    def _eval_num(self, node: Num):
        return JetPoly.constant(node.value)

    def _eval_name(self, node: Name):
        nm, n = self.names, self.space.n
        name = node.name
        sigma = None
        if node.word is not None:
            sigma = nm.word(node.word, node.word_pos, self.source)
        empty = MultiIndex.empty(n)
        if name in nm.base and sigma is None:
            return JetPoly.variable(JetCoord.base(nm.base[name]))
        if name in nm.fibre:
            return JetPoly.variable(JetCoord.fibre(nm.fibre[name], sigma or empty))
        if name in nm.dx and sigma is None:
            return Form.dx(nm.dx[name])
        if name in nm.omega:
            return Form.omega(nm.omega[name], sigma or empty)
        if name in nm.du:
            return from_du_basis({(Covector.du(nm.du[name], sigma or empty),): 1}, 1)
        if name == "D" and sigma is not None:
            return CDiffOp.total(sigma)
        if name in HEADS:
            raise ExprSyntaxError(f"{name} must be called with arguments", node.pos, self.source)
        raise self.fail(f"unknown name {name!r} for n={n}, m={self.space.m}", node.pos)

    def _eval_unary(self, node: Unary):
        v = self.eval(node.operand)
        if node.op == "+":
            return v
        if isinstance(v, tuple):
            return tuple(-x for x in v)
        if isinstance(v, SourceForm):
            return SourceForm(v.space, [-x for x in v.components])
        return -v

    def _eval_power(self, node: Power):
        v = self.eval(node.base)
        if isinstance(v, JetPoly):
            return v ** node.exponent
        if isinstance(v, CDiffOp) and v.rows == v.cols:
            out = CDiffOp.identity(v.rows, v.n)
            for _ in range(node.exponent):
                out = compose(out, v)
            return out
        raise self.fail("only functions and square operators can be raised to a power", node.pos)

    def _eval_binary(self, node: Binary):
        a, b = self.eval(node.left), self.eval(node.right)
        op, n = node.op, self.space.n
        if op == "/":
            if not (_is_scalar(b) and b.is_constant()):
                raise self.fail("division is only by a rational constant", node.pos)
            c = b.constant_term()
            if c == 0:
                raise self.fail("division by zero", node.pos)
            return self._scale(a, Fraction(1) / Fraction(c), node.pos)
        if op in "+-":
            return self._add(a, b if op == "+" else self._neg(b), node.pos)
        if op == "∧":
            if isinstance(a, (JetPoly, Form)) and isinstance(b, (JetPoly, Form)):
                return forms.wedge(a, b)
            raise self.fail("wedge needs forms on both sides", node.pos)
        # '*'
        if _is_scalar(a):
            return self._scale(b, a, node.pos)
        if _is_scalar(b) and not isinstance(a, CDiffOp):
            return self._scale(a, b, node.pos)
        if isinstance(a, Form) and isinstance(b, Form):
            return forms.wedge(a, b)
        if isinstance(a, CDiffOp) and isinstance(b, (CDiffOp, JetPoly)):
            b = _as_op(b, n)
            if a.cols != b.rows:
                raise self.fail(f"cannot compose {a.rows}x{a.cols} with {b.rows}x{b.cols}", node.pos)
            return compose(a, b)
        if isinstance(a, CDiffOp) and isinstance(b, tuple):
            if len(b) != a.cols:
                raise self.fail(f"operator takes {a.cols} components, got {len(b)}", node.pos)
            return a(b)
        raise self.fail(f"cannot multiply {_kind(a)} by {_kind(b)}", node.pos)

    def _neg(self, v):
        if isinstance(v, tuple):
            return tuple(-x for x in v)
        if isinstance(v, SourceForm):
            return SourceForm(v.space, [-x for x in v.components])
        return -v

    def _scale(self, v, c, pos):
        if isinstance(v, JetPoly):
            return v * c
        if isinstance(v, Form):
            return v * JetPoly.coerce(c)
        if isinstance(v, CDiffOp):
            return v.scale(c)
        if isinstance(v, tuple):
            return tuple(x * c for x in v)
        if isinstance(v, SourceForm):
            return SourceForm(v.space, [x * c for x in v.components])
        raise self.fail(f"cannot scale {_kind(v)}", pos)

    def _add(self, a, b, pos):
        n = self.space.n
        if isinstance(a, JetPoly) and isinstance(b, JetPoly):
            return a + b
        if isinstance(a, (JetPoly, Form)) and isinstance(b, (JetPoly, Form)):
            a, b = forms.as_form(a), forms.as_form(b)
            if a and b and a.degree != b.degree:
                raise self.fail(f"cannot add forms of degree {a.degree} and {b.degree}", pos)
            return a + b
        if isinstance(a, (CDiffOp, JetPoly)) and isinstance(b, (CDiffOp, JetPoly)):
            a, b = _as_op(a, n), _as_op(b, n)
            if a.shape != b.shape:
                raise self.fail(f"shape mismatch {a.shape} vs {b.shape}", pos)
            return a + b
        if isinstance(a, tuple) and isinstance(b, tuple):
            if len(a) != len(b):
                raise self.fail("vectors of different length", pos)
            return tuple(x + y for x, y in zip(a, b))
        if isinstance(a, SourceForm) and isinstance(b, SourceForm):
            return a + b
        raise self.fail(f"cannot add {_kind(a)} and {_kind(b)}", pos)

    def _eval_listlit(self, node: ListLit, inner: bool = False):
        items = [
            self._eval_listlit(x, inner=True) if isinstance(x, ListLit) else self.eval(x)
            for x in node.items
        ]
        if all(isinstance(x, JetPoly) for x in items):
            return tuple(items)
        if inner and all(isinstance(x, (JetPoly, CDiffOp)) for x in items):
            return _Row(items)
        if all(isinstance(x, (tuple, _Row)) for x in items):
            return self._matrix(node, items)
        raise self.fail("list entries must be functions, or rows of a matrix", node.pos)

    def _matrix(self, node: ListLit, rows: list) -> CDiffOp:
        n = self.space.n
        width = len(rows[0])
        entries = {}
        for a, row in enumerate(rows):
            if len(row) != width:
                raise self.fail("matrix rows have different lengths", node.pos)
            for b, cell in enumerate(row):
                if isinstance(cell, CDiffOp):
                    if cell.shape != (1, 1):
                        raise self.fail("matrix entries must be scalar operators", node.pos)
                    entries[(a, b)] = cell.entry(0, 0)
                else:
                    entries[(a, b)] = {MultiIndex.empty(n): cell}
        return CDiffOp(len(rows), width, n, entries)

    def _eval_call(self, node: Call):
        head = node.head
        if len(node.args) != HEADS[head]:
            raise self.fail(f"{head} takes {HEADS[head]} argument(s), got {len(node.args)}", node.pos)
        if head == "D":
            lam = self._base_index(node.args[0])
            v = self.eval(node.args[1])
            if isinstance(v, JetPoly):
                return v.total_derivative(lam)
            if isinstance(v, tuple):
                return tuple(x.total_derivative(lam) for x in v)
            raise self.fail("D(x, e) applies to functions", node.pos)
        v = self.eval(node.args[0])
        n = self.space.n
        try:
            if head in ("d", "h", "v", "dbar", "A"):
                if not isinstance(v, (JetPoly, Form)):
                    raise self.fail(f"{head} applies to forms", node.pos)
                f = forms.as_form(v)
                if head == "d":
                    return forms.d(f, n)
                if head == "h":
                    return forms.horizontalize(f)
                if head == "v":
                    return forms.vertical(f)
                if head == "A":
                    return forms.contact_homotopy(f)
                if f and len(f.contact_degrees()) > 1:
                    raise self.fail("dbar needs a form of a single contact degree", node.pos)
                return forms.dbar(f, n=n)
            if head == "EL":
                if isinstance(v, Form) and v.degree != n:
                    raise self.fail(f"EL needs a function or an {n}-form", node.pos)
                if not isinstance(v, (JetPoly, Form)):
                    raise self.fail("EL applies to a Lagrangian", node.pos)
                return euler_lagrange(v, self.space)
            if head in ("HLM", "TONTI"):
                src = self._source(v, node.pos)
                return helmholtz(src) if head == "HLM" else tonti_lagrangian(src)
            if head == "ADJ":
                op = _as_op(v, n)
                if op is None:
                    raise self.fail("ADJ applies to operators", node.pos)
                return adjoint(op)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise self.fail(str(exc), node.pos) from exc
        raise self.fail(f"unknown head {head}", node.pos)

    def _source(self, v, pos) -> SourceForm:
        if isinstance(v, SourceForm):
            return v
        if isinstance(v, JetPoly):
            v = (v,)
        if isinstance(v, tuple):
            if len(v) != self.space.m:
                raise self.fail(f"source form needs {self.space.m} components, got {len(v)}", pos)
            return SourceForm(self.space, v)
        raise self.fail("expected a source form (function or vector of functions)", pos)

    def _base_index(self, node: Node) -> int:
        if isinstance(node, Name) and node.word is None and node.name in self.names.base:
            return self.names.base[node.name]
        raise self.fail("first argument of D must be a base coordinate", getattr(node, "pos", 0))


def _kind(v) -> str:
    if isinstance(v, JetPoly):
        return "a function"
    if isinstance(v, Form):
        return f"a {v.degree}-form"
    if isinstance(v, CDiffOp):
        return f"a {v.rows}x{v.cols} operator"
    if isinstance(v, SourceForm):
        return "a source form"
    if isinstance(v, tuple):
        return f"a {len(v)}-vector"
    return type(v).__name__


def evaluate(source: str | Node, space: JetSpace) -> Value:
    """Parse (if needed) and evaluate an expression in ``space``."""
    text = source if isinstance(source, str) else ""
    node = parse(source) if isinstance(source, str) else source
    return Evaluator(space, text).eval(node)


def parse_poly(source: str, space: JetSpace) -> JetPoly:
    v = evaluate(source, space)
    if not isinstance(v, JetPoly):
        raise ExprTypeError(f"expected a function, got {_kind(v)}", 0, source)
    return v


def parse_form(source: str, space: JetSpace, degree: int | None = None) -> Form:
    v = evaluate(source, space)
    if not isinstance(v, (JetPoly, Form)):
        raise ExprTypeError(f"expected a form, got {_kind(v)}", 0, source)
    f = forms.as_form(v)
    if degree is not None:
        if f and f.degree != degree:
            raise ExprTypeError(f"expected a {degree}-form, got a {f.degree}-form", 0, source)
        if not f:
            f = Form.zero(degree)
    return f


def parse_operator(source: str, space: JetSpace) -> CDiffOp:
    v = evaluate(source, space)
    op = _as_op(v, space.n)
    if op is None:
        raise ExprTypeError(f"expected an operator, got {_kind(v)}", 0, source)
    return op


def parse_vector(source: str, space: JetSpace, length: int | None = None) -> tuple[JetPoly, ...]:
    v = evaluate(source, space)
    if isinstance(v, JetPoly):
        v = (v,)
    elif isinstance(v, SourceForm):
        v = v.components
    if not isinstance(v, tuple):
        raise ExprTypeError(f"expected a vector of functions, got {_kind(v)}", 0, source)
    if length is not None and len(v) != length:
        raise ExprTypeError(f"expected {length} components, got {len(v)}", 0, source)
    return v
