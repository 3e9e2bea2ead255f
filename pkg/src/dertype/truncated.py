"""Degree-truncated quotients ``A_N = kQ / (I + rad^{N+1})``.

The ideal is spanned inside the space of paths of length at most ``N`` by
closing the generators under left and right multiplication by arrows.  A
fully reduced echelon form of that span doubles as a rewriting system: each
pivot path rewrites to minus the rest of its row, and the non-pivot paths
form the normal-form basis.
"""

from __future__ import annotations

from collections import deque
from typing import Dict, List, Tuple

from .linalg import BudgetExceeded, SparseEchelon
from .quiver import AlgebraElement, PathKey, Presentation, PresentationError, path_order_key

DEFAULT_TRUNCATION = 8
DEFAULT_RULE_BUDGET = 200_000


class DegreeOverflow(ValueError):
    pass


def enumerate_paths(quiver, max_len: int) -> Dict[Tuple[str, str], List[PathKey]]:
    """All paths of length ``<= max_len`` grouped by ``(source, target)``."""
    out: Dict[Tuple[str, str], List[PathKey]] = {}
    for v in quiver.vertices:
        out.setdefault((v, v), []).append(())
    # frontier: paths of the current length, with their endpoints
    frontier = [((a.name,), a.source, a.target) for a in quiver.arrows]
    length = 1
    while frontier and length <= max_len:
        nxt = []
        for key, s, t in frontier:
            out.setdefault((s, t), []).append(key)
            if length < max_len:
                for a in quiver.arrows_from(t):
                    nxt.append(((a.name,) + key, s, a.target))
        frontier = nxt
        length += 1
    return out


class IdealSpan:
    """Two-sided ideal of the truncated path algebra, grown one generator at a time."""

    def __init__(self, quiver, N: int, field, budget: int = DEFAULT_RULE_BUDGET):
        self.quiver = quiver
        self.N = N
        self.field = field
        self.budget = budget
        self.echelon: Dict[Tuple[str, str], SparseEchelon] = {}
        self.size = 0

    def contains(self, g: AlgebraElement) -> bool:
        g = g.truncate(self.N)
        ech = self.echelon.get((g.source, g.target))
        return not (g.terms if ech is None else ech.reduce(g.terms))

    def add(self, g: AlgebraElement) -> bool:
        """Add ``g`` and everything it generates; return False if it was already inside."""
        one = self.field.one
        queue = deque([g.truncate(self.N)])
        grew = False
        while queue:
            g = queue.popleft()
            if not g:
                continue
            ech = self.echelon.setdefault((g.source, g.target), SparseEchelon(path_order_key))
            row = ech.insert(g.terms)
            if row is None:
                continue
            grew = True
            self.size += 1
            if self.size > self.budget:
                raise BudgetExceeded(f"completion exceeded {self.budget} rules at N={self.N}")
            r = AlgebraElement(g.source, g.target, row)
            if r.min_degree >= self.N:
                continue
            for a in self.quiver.arrows:
                ea = AlgebraElement(a.source, a.target, {(a.name,): one})
                if a.source == r.target:
                    queue.append(ea.concat(r, self.N))
                if a.target == r.source:
                    queue.append(r.concat(ea, self.N))
        return grew


class TruncatedAlgebra:
    def __init__(self, presentation: Presentation, N: int = DEFAULT_TRUNCATION, field=None,
                 rule_budget: int = DEFAULT_RULE_BUDGET):
        if N < 2:
            raise ValueError("truncation degree must be at least 2")
        self.presentation = presentation
        self.quiver = presentation.quiver
        self.N = N
        self.field = field or presentation.field
        self.rule_budget = rule_budget
        self._echelon: Dict[Tuple[str, str], SparseEchelon] = {}
        self._complete()
        self._paths = enumerate_paths(self.quiver, N)
        self._basis = {
            st: sorted((k for k in keys if k not in self._rules_for(st)), key=path_order_key)
            for st, keys in self._paths.items()
        }

    def _rules_for(self, st):
        ech = self._echelon.get(st)
        return ech.rows if ech else {}

    def _complete(self):
        span = IdealSpan(self.quiver, self.N, self.field, self.rule_budget)
        for g in self.presentation.relations:
            span.add(g.convert(self.field))
        self._echelon = span.echelon

    # --- rewriting view ----------------------------------------------

    @property
    def rules(self) -> List[Tuple[PathKey, AlgebraElement]]:
        """``(leading path, remainder)`` pairs, sorted by leading path."""
        out = []
        for (s, t), ech in self._echelon.items():
            for piv, row in ech.rows.items():
                rem = {k: -c for k, c in row.items() if k != piv}
                out.append((piv, AlgebraElement(s, t, rem)))
        out.sort(key=lambda r: (r[1].source, r[1].target, path_order_key(r[0])))
        return out

    def normal_form(self, x: AlgebraElement, strict: bool = True) -> AlgebraElement:
        if x.max_degree is not None and x.max_degree > self.N:
            if strict:
                raise DegreeOverflow(f"degree {x.max_degree} exceeds truncation {self.N}")
            x = x.truncate(self.N)
        ech = self._echelon.get((x.source, x.target))
        terms = x.terms if ech is None else ech.reduce(x.terms)
        return AlgebraElement(x.source, x.target, terms)

    def multiply(self, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
        """Normal form of ``x·y`` (``y`` first, then ``x``); mismatched endpoints give 0."""
        return self.normal_form(x.concat(y, self.N))

    def is_zero(self, x: AlgebraElement) -> bool:
        return not self.normal_form(x, strict=False)

    def element(self, *names, coefficient=1) -> AlgebraElement:
        key = tuple(names)
        s, t = self.quiver.path_endpoints(key)
        return self.normal_form(AlgebraElement(s, t, {key: self.field(coefficient)}))

    def idempotent(self, v) -> AlgebraElement:
        return AlgebraElement(v, v, {(): self.field.one})

    def rewrite_step(self, key: PathKey):
        """All single-step subword rewrites of a path: ``u·lead·v -> u·rem·v``."""
        if not key:
            return []
        s, t = self.quiver.path_endpoints(key)
        out = []
        if not hasattr(self, "_rule_cache"):
            self._rule_cache = self.rules
        for lead, rem in self._rule_cache:
            n = len(lead)
            if n == 0 or n > len(key):
                continue
            for i in range(len(key) - n + 1):
                if key[i:i + n] == lead:
                    u, v = key[:i], key[i + n:]
                    terms = {}
                    for k, c in rem.terms.items():
                        w = u + k + v
                        if len(w) <= self.N:
                            terms[w] = terms.get(w, 0) + c
                    out.append(AlgebraElement(s, t, terms))
        return out

    def confluence_failures(self, max_degree: int | None = None) -> list:
        """Paths whose subword rewrites disagree with the global normal form.

        Local confluence means every single rewriting step preserves the
        normal form; an empty list certifies it up to ``max_degree``.
        """
        limit = self.N if max_degree is None else min(max_degree, self.N)
        bad = []
        for (s, t), keys in self._paths.items():
            for key in keys:
                if not key or len(key) > limit:
                    continue
                nf = self.normal_form(AlgebraElement(s, t, {key: self.field.one}))
                for alt in self.rewrite_step(key):
                    if self.normal_form(alt) != nf:
                        bad.append((key, alt))
        return bad

    # --- bases ----------------------------------------------------------

    def basis(self, source=None, target=None) -> List[PathKey]:
        """Normal-form basis of ``e_target A e_source``, or of all of ``A``."""
        if source is None and target is None:
            return [k for st in sorted(self._basis) for k in self._basis[st]]
        return list(self._basis.get((str(source), str(target)), []))

    def basis_elements(self, source, target) -> List[AlgebraElement]:
        one = self.field.one
        return [AlgebraElement(source, target, {k: one}) for k in self.basis(source, target)]

    def dim(self, source=None, target=None) -> int:
        if source is None and target is None:
            return sum(len(v) for v in self._basis.values())
        return len(self.basis(source, target))

    def coordinates(self, x: AlgebraElement) -> list:
        nf = self.normal_form(x, strict=False)
        zero = self.field.zero
        return [nf.terms.get(k, zero) for k in self._basis.get((x.source, x.target), [])]

    def from_coordinates(self, source, target, coords) -> AlgebraElement:
        return AlgebraElement(source, target, dict(zip(self.basis(source, target), coords)))

    def radical_power_dims(self) -> List[int]:
        """``dim rad^k A_N`` for ``k = 0..N+1``."""
        out = []
        for k in range(self.N + 2):
            total = 0
            for (s, t), keys in self._paths.items():
                ech = SparseEchelon(path_order_key)
                for key in keys:
                    if len(key) >= k:
                        ech.insert(self.normal_form(AlgebraElement(s, t, {key: self.field.one})).terms)
                total += len(ech)
            out.append(total)
        return out

    def radical_layers(self) -> List[int]:
        """``dim rad^k / rad^{k+1}`` for ``k = 0..N``."""
        d = self.radical_power_dims()
        return [d[i] - d[i + 1] for i in range(len(d) - 1)]

    def __repr__(self):
        return f"TruncatedAlgebra(N={self.N}, dim={self.dim()})"


def build_truncated_algebra(p: Presentation, N: int = DEFAULT_TRUNCATION, field=None,
                            rule_budget: int = DEFAULT_RULE_BUDGET) -> TruncatedAlgebra:
    from .quiver import is_admissible

    report = is_admissible(p)
    if not report:
        raise PresentationError(f"presentation is not admissible: {report.violations}")
    return TruncatedAlgebra(p, N, field, rule_budget)


def normal_form(x: AlgebraElement, alg: TruncatedAlgebra) -> AlgebraElement:
    return alg.normal_form(x)


def multiply(x: AlgebraElement, y: AlgebraElement, alg: TruncatedAlgebra) -> AlgebraElement:
    return alg.multiply(x, y)
