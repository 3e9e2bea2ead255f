"""Quivers, paths and elements of path algebras.

Paths are written right to left: the path ``("b", "a")`` traverses ``a``
first and then ``b``.  Internally a path is a plain tuple of arrow ids;
:class:`Path` wraps one together with its endpoints for the public API.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Tuple

from .fields import QQ, format_scalar

PathKey = Tuple[str, ...]


class PresentationError(ValueError):
    """Structural problem with a quiver, path or relation."""


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Quiver:
    vertices: Tuple[str, ...]
    arrows: Tuple[Arrow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        if not self.vertices:
            raise PresentationError("a quiver needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise PresentationError("duplicate vertex ids")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise PresentationError("duplicate arrow ids")
        vs = set(self.vertices)
        for a in self.arrows:
            if a.source not in vs or a.target not in vs:
                raise PresentationError(f"arrow {a.name} has an endpoint outside the vertex set")

    @classmethod
    def from_spec(cls, vertices, arrows) -> "Quiver":
        """``arrows`` is an iterable of ``(name, source, target)``."""
        return cls(tuple(str(v) for v in vertices), tuple(Arrow(str(n), str(s), str(t)) for n, s, t in arrows))

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise PresentationError(f"unknown arrow {name!r}")

    def has_arrow(self, name: str) -> bool:
        return any(a.name == name for a in self.arrows)

    @property
    def arrow_map(self) -> Dict[str, Arrow]:
        return {a.name: a for a in self.arrows}

    def arrows_from(self, v: str):
        return [a for a in self.arrows if a.source == v]

    def arrows_to(self, v: str):
        return [a for a in self.arrows if a.target == v]

    def loops(self, v: str):
        return [a for a in self.arrows if a.source == v and a.target == v]

    def is_connected(self) -> bool:
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            v = stack.pop()
            for a in self.arrows:
                for x, y in ((a.source, a.target), (a.target, a.source)):
                    if x == v and y not in seen:
                        seen.add(y)
                        stack.append(y)
        return len(seen) == len(self.vertices)

    def path_endpoints(self, key: PathKey, vertex: str | None = None) -> Tuple[str, str]:
        """Return ``(source, target)`` of a nontrivial path, checking composability."""
        if not key:
            if vertex is None:
                raise PresentationError("trivial path needs a vertex")
            return vertex, vertex
        amap = self.arrow_map
        try:
            arrows = [amap[n] for n in key]
        except KeyError as exc:
            raise PresentationError(f"unknown arrow {exc.args[0]!r}") from None
        for later, earlier in zip(arrows, arrows[1:]):
            if later.source != earlier.target:
                raise PresentationError(
                    f"path {'*'.join(key)} is not composable at {later.name}{earlier.name}"
                )
        return arrows[-1].source, arrows[0].target


@dataclass(frozen=True)
class Path:
    """A path of a quiver; ``arrows`` is written right to left."""

    arrows: PathKey
    source: str
    target: str

    @classmethod
    def trivial(cls, vertex: str) -> "Path":
        return cls((), str(vertex), str(vertex))

    @classmethod
    def of(cls, quiver: Quiver, *names: str) -> "Path":
        key = tuple(names)
        s, t = quiver.path_endpoints(key)
        return cls(key, s, t)

    @property
    def length(self) -> int:
        return len(self.arrows)

    def __str__(self):
        return "*".join(self.arrows) if self.arrows else f"e_{self.source}"


def compose_paths(p: Path, q: Path) -> Path:
    """The concatenation ``p·q``: first ``q``, then ``p``."""
    if p.source != q.target:
        raise PresentationError(f"cannot compose {p} after {q}: {p.source} != {q.target}")
    return Path(p.arrows + q.arrows, q.source, p.target)


def _heavier_first(name: str):
    # inverts string order, so that "a" outranks "b" and "ab"
    return tuple(-ord(ch) for ch in name) + (1,)


def path_order_key(key: PathKey):
    """Degree first, then lexicographic with ``a > b > c > ...`` on arrow ids."""
    return (len(key), tuple(_heavier_first(n) for n in key))


class AlgebraElement:
    """A finite linear combination of paths sharing one source and one target.

    Zero coefficients are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("source", "target", "terms")

    def __init__(self, source: str, target: str, terms: Mapping[PathKey, object] | None = None):
        self.source = str(source)
        self.target = str(target)
        self.terms: Dict[PathKey, object] = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def zero(cls, source, target) -> "AlgebraElement":
        return cls(source, target, {})

    @classmethod
    def idempotent(cls, vertex, field=QQ) -> "AlgebraElement":
        return cls(vertex, vertex, {(): field.one})

    @classmethod
    def from_path(cls, quiver: Quiver, path, coefficient=Fraction(1)) -> "AlgebraElement":
        if isinstance(path, Path):
            return cls(path.source, path.target, {path.arrows: coefficient})
        key = tuple(path)
        s, t = quiver.path_endpoints(key)
        return cls(s, t, {key: coefficient})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise PresentationError(
                f"endpoint mismatch: {self.source}->{self.target} vs {other.source}->{other.target}"
            )

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return AlgebraElement(self.source, self.target, out)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.source, self.target, {k: -c for k, c in self.terms.items()})

    def scale(self, c) -> "AlgebraElement":
        return AlgebraElement(self.source, self.target, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c):
        if isinstance(c, AlgebraElement):
            return NotImplemented
        return self.scale(c)

    def concat(self, other: "AlgebraElement", max_degree: int | None = None) -> "AlgebraElement":
        """Product in the path algebra (no reduction); ``self`` after ``other``."""
        if self.source != other.target:
            return AlgebraElement.zero(other.source, self.target)
        out: Dict[PathKey, object] = {}
        for p, c in self.terms.items():
            for q, d in other.terms.items():
                if max_degree is not None and len(p) + len(q) > max_degree:
                    continue
                k = p + q
                out[k] = out.get(k, 0) + c * d
        return AlgebraElement(other.source, self.target, out)

    def convert(self, field) -> "AlgebraElement":
        return AlgebraElement(self.source, self.target, {k: field(c) for k, c in self.terms.items()})

    def truncate(self, max_degree: int) -> "AlgebraElement":
        return AlgebraElement(
            self.source, self.target, {k: c for k, c in self.terms.items() if len(k) <= max_degree}
        )

    @property
    def min_degree(self):
        return min((len(k) for k in self.terms), default=None)

    @property
    def max_degree(self):
        return max((len(k) for k in self.terms), default=None)

    def leading(self):
        """Largest path in degree-lex order with its coefficient."""
        k = max(self.terms, key=path_order_key)
        return k, self.terms[k]

    def monic(self) -> "AlgebraElement":
        if not self.terms:
            return self
        _, c = self.leading()
        return self.scale(1 / c)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: path_order_key(kv[0]), reverse=True)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return (self.source, self.target) == (other.source, other.target) and self.terms == other.terms

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.terms.items())))

    def to_dsl(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, c in self.sorted_terms():
            word = "*".join(k) if k else f"e_{self.source}"
            if c == 1:
                body = word
                sign = "+"
            elif c == -1:
                body = word
                sign = "-"
            else:
                s = format_scalar(c)
                if s.startswith("-"):
                    sign, s = "-", s[1:]
                else:
                    sign = "+"
                body = f"{s}*{word}"
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"<{self.to_dsl()} : {self.source}->{self.target}>"


@dataclass(frozen=True)
class Presentation:
    """A quiver with relation generators over an exact field."""

    quiver: Quiver
    relations: Tuple[AlgebraElement, ...] = ()
    field: object = field(default=QQ, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        for r in self.relations:
            for k in r.terms:
                if k:
                    s, t = self.quiver.path_endpoints(k)
                    if (s, t) != (r.source, r.target):
                        raise PresentationError(f"relation {r.to_dsl()} mixes endpoints")
                elif r.source != r.target:
                    raise PresentationError("trivial path in a relation between distinct vertices")

    @property
    def vertex_count(self) -> int:
        return len(self.quiver.vertices)

    def element(self, *names: str, coefficient=1) -> AlgebraElement:
        return AlgebraElement.from_path(self.quiver, names, self.field(coefficient))

    def with_relations(self, relations: Iterable[AlgebraElement]) -> "Presentation":
        return Presentation(self.quiver, tuple(relations), self.field)

    def to_dsl(self) -> str:
        from .dsl import format_presentation

        return format_presentation(self)

    def __repr__(self):
        return f"Presentation({self.to_dsl()!r})"


@dataclass
class AdmissibilityReport:
    admissible: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.admissible


def is_admissible(p: Presentation) -> AdmissibilityReport:
    """Every generator must lie in rad² and have uniform endpoints."""
    violations = []
    for i, r in enumerate(p.relations):
        if r.is_zero():
            continue
        short = [k for k in r.terms if len(k) < 2]
        if short:
            violations.append(
                {"generator": i, "relation": r.to_dsl(), "reason": "path of length < 2",
                 "paths": ["*".join(k) or f"e_{r.source}" for k in short]}
            )
        for k in r.terms:
            if k:
                try:
                    s, t = p.quiver.path_endpoints(k)
                except PresentationError as exc:
                    violations.append({"generator": i, "relation": r.to_dsl(), "reason": str(exc)})
                    continue
                if (s, t) != (r.source, r.target):
                    violations.append({"generator": i, "relation": r.to_dsl(), "reason": "non-uniform endpoints"})
    return AdmissibilityReport(not violations, violations)
