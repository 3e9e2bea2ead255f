"""Text format for presentations.

::

    quiver { v 1 2; a:1->1, b:1->2, c:2->1 } rel { a*a; b*c }

Relations are rational-linear combinations of ``*``-separated arrow ids,
written right to left (``b*a`` means first ``a``, then ``b``).  ``x^3`` is
shorthand for ``x*x*x``; parentheses and rational coefficients such as
``1/2*a*b`` are allowed, and ``e_<v>`` denotes the trivial path at ``v``.
``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .fields import QQ
from .quiver import AlgebraElement, Arrow, Presentation, PresentationError, Quiver

Word = Tuple[str, ...]
Formal = Dict[Word, Fraction]


class DSLError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        loc = f"line {line}, column {column}: " if line else ""
        super().__init__(loc + message)


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<arrow>->)|(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<sym>[{}();:,*+\-/^])"
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DSLError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, m.start() - line_start + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return DSLError(msg, tok.line, tok.col)

    def accept(self, text) -> Optional[Token]:
        if self.tok.text == text and self.tok.kind != "eof":
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text) -> Token:
        t = self.accept(text)
        if t is None:
            raise self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return t

    def expect_kind(self, *kinds) -> Token:
        if self.tok.kind not in kinds:
            raise self.error(f"expected {' or '.join(kinds)}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    # expressions -------------------------------------------------------

    def expr(self) -> Formal:
        sign = 1
        if self.accept("-"):
            sign = -1
        else:
            self.accept("+")
        out = _scale(self.term(), sign)
        while self.tok.text in ("+", "-"):
            op = self.expect_kind("sym").text
            out = _add(out, _scale(self.term(), 1 if op == "+" else -1))
        return out

    def term(self) -> Formal:
        out = self.factor()
        while self.accept("*"):
            out = _mul(out, self.factor())
        return out

    def factor(self) -> Formal:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            val = Fraction(int(t.text))
            if self.accept("/"):
                den = self.expect_kind("num")
                if int(den.text) == 0:
                    raise self.error("zero denominator", den)
                val /= int(den.text)
            return {(): val}
        if t.kind == "ident":
            self.i += 1
            out = {(t.text,): Fraction(1)}
            if self.accept("^"):
                k = int(self.expect_kind("num").text)
                base, out = out, {(): Fraction(1)}
                for _ in range(k):
                    out = _mul(out, base)
            return out
        if self.accept("("):
            out = self.expr()
            self.expect(")")
            if self.accept("^"):
                k = int(self.expect_kind("num").text)
                base, out = out, {(): Fraction(1)}
                for _ in range(k):
                    out = _mul(out, base)
            return out
        raise self.error(f"unexpected {t.text or 'end of input'!r} in expression")

    # presentations -----------------------------------------------------

    def presentation(self, field) -> Presentation:
        self.expect("quiver")
        self.expect("{")
        v = self.expect_kind("ident")
        if v.text != "v":
            raise self.error("quiver body must start with 'v'", v)
        vertices = []
        while self.tok.kind in ("num", "ident"):
            vertices.append(self.tok.text)
            self.i += 1
        if not vertices:
            raise self.error("at least one vertex required")
        arrows = []
        if self.accept(";"):
            while self.tok.text != "}":
                name = self.expect_kind("ident")
                self.expect(":")
                s = self.expect_kind("num", "ident")
                self.expect("->")
                t = self.expect_kind("num", "ident")
                for end in (s, t):
                    if end.text not in vertices:
                        raise self.error(f"unknown vertex {end.text!r}", end)
                if any(a.name == name.text for a in arrows):
                    raise self.error(f"duplicate arrow {name.text!r}", name)
                arrows.append(Arrow(name.text, s.text, t.text))
                if not self.accept(","):
                    self.accept(";")
                    break
        self.expect("}")
        quiver = Quiver(tuple(vertices), tuple(arrows))
        relations = []
        if self.accept("rel"):
            self.expect("{")
            while not self.accept("}"):
                start = self.tok
                formal = self.expr()
                try:
                    relations.append(resolve_formal(formal, quiver, field))
                except PresentationError as exc:
                    raise self.error(str(exc), start) from None
                if not self.accept(";"):
                    self.expect("}")
                    break
        if self.tok.kind != "eof":
            raise self.error(f"trailing input {self.tok.text!r}")
        return Presentation(quiver, tuple(r for r in relations if r), field)


def _scale(f: Formal, c) -> Formal:
    return {w: c * v for w, v in f.items() if c * v}


def _add(f: Formal, g: Formal) -> Formal:
    out = dict(f)
    for w, v in g.items():
        out[w] = out.get(w, 0) + v
    return {w: v for w, v in out.items() if v}


def _mul(f: Formal, g: Formal) -> Formal:
    out: Formal = {}
    for w1, c1 in f.items():
        for w2, c2 in g.items():
            w = w1 + w2
            out[w] = out.get(w, 0) + c1 * c2
    return {w: v for w, v in out.items() if v}


def parse_formal(text: str) -> Formal:
    """Parse an expression into a map ``word -> coefficient`` without resolving atoms."""
    p = _Parser(text)
    out = p.expr()
    if p.tok.kind != "eof":
        raise p.error(f"trailing input {p.tok.text!r}")
    return out


def _idempotent_vertex(name: str, quiver: Quiver) -> Optional[str]:
    if name.startswith("e_") and not quiver.has_arrow(name) and name[2:] in quiver.vertices:
        return name[2:]
    return None


def resolve_formal(formal: Formal, quiver: Quiver, field=QQ, vertex: str | None = None) -> AlgebraElement:
    """Turn a formal expression over arrow ids into a path-algebra element."""
    terms = {}
    ends = set()
    pending_scalar = Fraction(0)
    for word, c in formal.items():
        arrows = []
        idem = None
        for atom in word:
            v = _idempotent_vertex(atom, quiver)
            if v is not None:
                if idem is not None and idem != v:
                    arrows = None
                    break
                idem = v
                continue
            if not quiver.has_arrow(atom):
                raise PresentationError(f"unknown arrow {atom!r}")
            arrows.append(atom)
        if arrows is None:
            continue
        key = tuple(arrows)
        if key:
            try:
                s, t = quiver.path_endpoints(key)
            except PresentationError:
                raise
            if idem is not None and idem not in (s, t):
                continue
        elif idem is not None:
            s = t = idem
        else:
            pending_scalar += c
            continue
        ends.add((s, t))
        terms[key] = terms.get(key, 0) + field(c)
    if pending_scalar:
        if vertex is not None:
            ends.add((vertex, vertex))
            target = vertex
        elif len(ends) == 1 and next(iter(ends))[0] == next(iter(ends))[1]:
            target = next(iter(ends))[0]
        elif not ends and len(quiver.vertices) == 1:
            target = quiver.vertices[0]
            ends.add((target, target))
        else:
            raise PresentationError("cannot place a scalar term: ambiguous vertex")
        terms[()] = terms.get((), 0) + field(pending_scalar)
    if len(ends) > 1:
        raise PresentationError("endpoint mismatch inside an expression")
    if not ends:
        v = vertex or quiver.vertices[0]
        return AlgebraElement.zero(v, v)
    s, t = ends.pop()
    return AlgebraElement(s, t, terms)


def parse_presentation(text: str, field=QQ) -> Presentation:
    return _Parser(text).presentation(field)


def parse_element(text: str, quiver: Quiver, field=QQ, vertex: str | None = None) -> AlgebraElement:
    return resolve_formal(parse_formal(text), quiver, field, vertex)


def evaluate_formal(
    formal: Formal,
    atom: Callable[[str], AlgebraElement],
    multiply: Callable[[AlgebraElement, AlgebraElement], AlgebraElement],
    field=QQ,
) -> AlgebraElement:
    """Evaluate a formal expression with atoms bound to algebra elements.

    Scalar-only words are placed at the common endpoint of the other terms.
    """
    total = None
    scalar = 0
    for word, c in formal.items():
        if not word:
            scalar += c
            continue
        val = atom(word[0])
        for name in word[1:]:
            val = multiply(val, atom(name))
        val = val.scale(field(c))
        if total is None:
            total = val
        elif (total.source, total.target) != (val.source, val.target):
            if val.is_zero():
                continue
            if total.is_zero():
                total = val
                continue
            raise PresentationError("endpoint mismatch inside an expression")
        else:
            total = total + val
    if scalar:
        if total is None or total.source != total.target:
            raise PresentationError("cannot place a scalar term: ambiguous vertex")
        total = total + AlgebraElement(total.source, total.source, {(): field(scalar)})
    if total is None:
        raise PresentationError("expression is a bare scalar")
    return total


def format_presentation(p: Presentation) -> str:
    q = p.quiver
    body = "v " + " ".join(q.vertices)
    if q.arrows:
        body += "; " + ", ".join(f"{a.name}:{a.source}->{a.target}" for a in q.arrows)
    rels = "; ".join(r.to_dsl() for r in p.relations)
    return f"quiver {{ {body} }} rel {{ {rels} }}" if rels else f"quiver {{ {body} }} rel {{}}"
