"""Bounded complexes of finitely generated projectives over a truncated algebra.

Conventions
-----------
``A_i`` is the indecomposable projective ``A e_i``, realized as the span of
basis paths starting at ``i``.  A map ``A_i -> A_j`` is right multiplication
``u -> u·x`` by an element ``x`` of ``e_i A e_j`` (a combination of paths from
``j`` to ``i``), so the composite ``A_i -x-> A_j -y-> A_k`` is ``x·y``.

The differential ``d_n: P_n -> P_{n-1}`` is a matrix whose rows index the
summands of ``P_{n-1}`` and whose columns index the summands of ``P_n``.
Summands are listed vertex by vertex in the algebra's vertex order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .dsl import parse_element, parse_formal, parse_presentation, resolve_formal
from .quiver import AlgebraElement, Presentation, PresentationError
from .truncated import TruncatedAlgebra

FORMAT = "dertype-complex/1"


class BlockShapeError(ValueError):
    pass


@dataclass
class ProjectiveComplex:
    vertices: Tuple[str, ...]
    ranks: Dict[int, Tuple[int, ...]]
    differentials: Dict[int, list] = field(default_factory=dict)
    summands: Optional[List[List[Tuple[int, int]]]] = None

    def __post_init__(self):
        self.vertices = tuple(str(v) for v in self.vertices)
        self.ranks = {int(n): tuple(int(x) for x in r) for n, r in self.ranks.items() if any(r)}
        for n, r in self.ranks.items():
            if len(r) != len(self.vertices):
                raise BlockShapeError(f"rank vector in degree {n} has {len(r)} entries, expected {len(self.vertices)}")
        diffs = {}
        for n, M in self.differentials.items():
            n = int(n)
            rows, cols = self.summand_vertices(n - 1), self.summand_vertices(n)
            if not rows or not cols:
                continue
            if len(M) != len(rows) or any(len(row) != len(cols) for row in M):
                raise BlockShapeError(f"d_{n} must be {len(rows)}x{len(cols)}")
            fixed = []
            for r, row in enumerate(M):
                out = []
                for c, x in enumerate(row):
                    if x is None or (isinstance(x, AlgebraElement) and not x and
                                     (x.source, x.target) != (rows[r], cols[c])):
                        x = AlgebraElement.zero(rows[r], cols[c])
                    if (x.source, x.target) != (rows[r], cols[c]):
                        raise BlockShapeError(
                            f"d_{n}[{r}][{c}] = {x.to_dsl()} should run from {rows[r]} to {cols[c]}")
                    out.append(x)
                fixed.append(out)
            diffs[n] = fixed
        self.differentials = diffs

    def summand_vertices(self, n: int) -> List[str]:
        r = self.ranks.get(n)
        if r is None:
            return []
        return [v for v, k in zip(self.vertices, r) for _ in range(k)]

    @property
    def degrees(self) -> List[int]:
        return sorted(self.ranks)

    def differential(self, n: int):
        """``d_n`` as a matrix, with zero entries filled in."""
        rows, cols = self.summand_vertices(n - 1), self.summand_vertices(n)
        if n in self.differentials:
            return self.differentials[n]
        return [[AlgebraElement.zero(r, c) for c in cols] for r in rows]

    def direct_sum(self, other: "ProjectiveComplex") -> "ProjectiveComplex":
        if self.vertices != other.vertices:
            raise BlockShapeError("complexes over different vertex sets")
        degs = sorted(set(self.ranks) | set(other.ranks))
        zero = (0,) * len(self.vertices)
        ranks = {n: tuple(a + b for a, b in zip(self.ranks.get(n, zero), other.ranks.get(n, zero))) for n in degs}

        def order(cx, n):
            # new position of each old summand after merging by vertex
            return cx.summand_vertices(n)

        diffs = {}
        for n in degs:
            if n - 1 not in ranks:
                continue
            rows_a, cols_a = order(self, n - 1), order(self, n)
            rows_b, cols_b = order(other, n - 1), order(other, n)
            rpos, cpos = _merge_positions(self.vertices, rows_a, rows_b), _merge_positions(self.vertices, cols_a, cols_b)
            nrows, ncols = len(rows_a) + len(rows_b), len(cols_a) + len(cols_b)
            M = [[None] * ncols for _ in range(nrows)]
            for (src, rp, cp) in ((self, rpos[0], cpos[0]), (other, rpos[1], cpos[1])):
                D = src.differential(n)
                for r, row in enumerate(D):
                    for c, x in enumerate(row):
                        M[rp[r]][cp[c]] = x
            diffs[n] = M
        summands = None
        if self.summands is not None or other.summands is not None:
            summands = []
            for which, cx in ((0, self), (1, other)):
                parts = cx.summands or [[(n, i) for n in cx.degrees for i in range(len(cx.summand_vertices(n)))]]
                for part in parts:
                    new = []
                    for n, i in part:
                        pos = _merge_positions(self.vertices, self.summand_vertices(n), other.summand_vertices(n))
                        new.append((n, pos[which][i]))
                    summands.append(new)
        return ProjectiveComplex(self.vertices, ranks, diffs, summands)

    def shift(self, k: int) -> "ProjectiveComplex":
        """``C[k]_n = C_{n-k}``; differentials pick up the sign ``(-1)^k``."""
        sign = -1 if k % 2 else 1
        ranks = {n + k: r for n, r in self.ranks.items()}
        diffs = {n + k: [[x.scale(sign) for x in row] for row in M] for n, M in self.differentials.items()}
        summands = None if self.summands is None else [[(n + k, i) for n, i in part] for part in self.summands]
        return ProjectiveComplex(self.vertices, ranks, diffs, summands)


def _merge_positions(vertices, left: List[str], right: List[str]):
    """Positions of the summands of ``left`` and ``right`` inside their merged, vertex-sorted list."""
    lp, rp = [], []
    pos = 0
    li = ri = 0
    for v in vertices:
        while li < len(left) and left[li] == v:
            lp.append(pos)
            pos += 1
            li += 1
        while ri < len(right) and right[ri] == v:
            rp.append(pos)
            pos += 1
            ri += 1
    return lp, rp


def stalk(vertices, vertex, degree: int = 0, multiplicity: int = 1) -> ProjectiveComplex:
    r = tuple(multiplicity if v == str(vertex) else 0 for v in vertices)
    return ProjectiveComplex(tuple(vertices), {degree: r}, {})


# --- checks -------------------------------------------------------------------

@dataclass
class ComplexReport:
    square_zero: bool
    radical: bool
    bounded: bool
    failures: list = field(default_factory=list)
    truncation: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.square_zero and self.radical and self.bounded

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "square_zero": self.square_zero, "radical": self.radical,
                "bounded": self.bounded, "failures": self.failures, "truncation": self.truncation}


def compose_matrices(first, second, alg: TruncatedAlgebra, rows: List[str], cols: List[str]):
    """Matrix of ``second ∘ first``: entry ``[r][c] = sum_m first[m][c] · second[r][m]``."""
    out = []
    for r in range(len(rows)):
        row = []
        for c in range(len(cols)):
            acc = AlgebraElement.zero(rows[r], cols[c])
            for m in range(len(first)):
                x, y = first[m][c], second[r][m]
                if x and y:
                    acc = acc + alg.multiply(x, y)
            row.append(alg.normal_form(acc, strict=False))
        out.append(row)
    return out


def check_complex(C: ProjectiveComplex, alg: TruncatedAlgebra) -> ComplexReport:
    failures = []
    square_zero = True
    for n in C.degrees:
        if n - 1 in C.ranks and n - 2 in C.ranks:
            comp = compose_matrices(C.differential(n), C.differential(n - 1), alg,
                                    C.summand_vertices(n - 2), C.summand_vertices(n))
            for r, row in enumerate(comp):
                for c, x in enumerate(row):
                    if x:
                        square_zero = False
                        failures.append({"check": "square_zero", "degree": n, "entry": [r, c], "value": x.to_dsl()})
    radical = True
    for n, M in C.differentials.items():
        for r, row in enumerate(M):
            for c, x in enumerate(row):
                nf = alg.normal_form(x, strict=False)
                if () in nf.terms:
                    radical = False
                    failures.append({"check": "radical", "degree": n, "entry": [r, c], "value": x.to_dsl()})
    bounded = len(C.ranks) < float("inf")
    return ComplexReport(square_zero, radical, bounded, failures, alg.N)


@dataclass(frozen=True)
class VectorRank:
    ranks: Tuple[Tuple[int, Tuple[int, ...]], ...]

    def as_dict(self) -> Dict[int, Tuple[int, ...]]:
        return dict(self.ranks)

    def scaled(self, m: int) -> "VectorRank":
        return VectorRank(tuple((n, tuple(m * x for x in r)) for n, r in self.ranks))

    def __add__(self, other: "VectorRank") -> "VectorRank":
        a, b = self.as_dict(), other.as_dict()
        width = len(next(iter(a.values()), next(iter(b.values()), ())))
        zero = (0,) * width
        return VectorRank(tuple(sorted(
            (n, tuple(x + y for x, y in zip(a.get(n, zero), b.get(n, zero)))) for n in set(a) | set(b))))


def vector_rank(C: ProjectiveComplex) -> VectorRank:
    return VectorRank(tuple(sorted((n, r) for n, r in C.ranks.items() if any(r))))


# --- linear models --------------------------------------------------------------

def _module_basis(alg: TruncatedAlgebra, summands: List[str]):
    """Basis of ``⊕ A e_i`` as ``(summand, target, path)`` triples."""
    out = []
    for s, v in enumerate(summands):
        for t in alg.quiver.vertices:
            for k in alg.basis(v, t):
                out.append((s, t, k))
    return out


def differential_matrix(C: ProjectiveComplex, n: int, alg: TruncatedAlgebra):
    """Field matrix of ``d_n`` acting on the truncated modules (rows: ``P_{n-1}``)."""
    src, tgt = C.summand_vertices(n), C.summand_vertices(n - 1)
    sb, tb = _module_basis(alg, src), _module_basis(alg, tgt)
    index = {b: i for i, b in enumerate(tb)}
    zero = alg.field.zero
    M = [[zero] * len(sb) for _ in tb]
    D = C.differential(n)
    one = alg.field.one
    for j, (s, t, k) in enumerate(sb):
        u = AlgebraElement(src[s], t, {k: one})
        for r in range(len(tgt)):
            x = D[r][s]
            if not x:
                continue
            img = alg.multiply(u, x)
            for kk, c in img.terms.items():
                M[index[(r, img.target, kk)]][j] += c
    return M, len(tb), len(sb)


def homology_dims(C: ProjectiveComplex, alg: TruncatedAlgebra) -> Dict[int, int]:
    """``dim ker d_n - rank d_{n+1}`` per degree, over the truncated modules."""
    zero, one = alg.field.zero, alg.field.one
    ranks = {}
    dims = {}
    for n in C.degrees:
        dims[n] = len(_module_basis(alg, C.summand_vertices(n)))
    for n in set(C.degrees) | {n + 1 for n in C.degrees}:
        if n in C.ranks and n - 1 in C.ranks:
            M, _, _ = differential_matrix(C, n, alg)
            ranks[n] = linalg.rank(M, zero, one)
        else:
            ranks[n] = 0
    return {n: dims[n] - ranks.get(n, 0) - ranks.get(n + 1, 0) for n in C.degrees}


class _HomLayout:
    """Coordinates for graded maps ``C -> D[shift]`` (components ``C_n -> D_{n+shift}``)."""

    def __init__(self, C, D, shift, alg):
        self.C, self.D, self.shift, self.alg = C, D, shift, alg
        self.vars = []  # (n, r, c, path)
        for n in C.degrees:
            rows, cols = D.summand_vertices(n + shift), C.summand_vertices(n)
            for r, rv in enumerate(rows):
                for c, cv in enumerate(cols):
                    for k in alg.basis(rv, cv):
                        self.vars.append((n, r, c, k))
        self.index = {v: i for i, v in enumerate(self.vars)}

    def matrices(self, vec) -> Dict[int, list]:
        out = {}
        one = self.alg.field.one
        for n in self.C.degrees:
            rows, cols = self.D.summand_vertices(n + self.shift), self.C.summand_vertices(n)
            out[n] = [[AlgebraElement.zero(rv, cv) for cv in cols] for rv in rows]
        for (n, r, c, k), x in zip(self.vars, vec):
            if x:
                M = out[n]
                M[r][c] = M[r][c] + AlgebraElement(M[r][c].source, M[r][c].target, {k: x * one})
        return out

    def vector(self, mats: Dict[int, list]) -> list:
        zero = self.alg.field.zero
        v = [zero] * len(self.vars)
        for n, M in mats.items():
            for r, row in enumerate(M):
                for c, x in enumerate(row):
                    for k, coef in self.alg.normal_form(x, strict=False).terms.items():
                        v[self.index[(n, r, c, k)]] += coef
        return v


def _unit(i, size, zero, one):
    v = [zero] * size
    v[i] = one
    return v


def _chain_defect(layout: _HomLayout, mats):
    """Coordinates of ``d^D f - f d^C`` (signs are irrelevant for dimensions)."""
    C, D, s, alg = layout.C, layout.D, layout.shift, layout.alg
    out = []
    for n in sorted(set(C.degrees) | {n + 1 for n in C.degrees}):
        rows, cols = D.summand_vertices(n - 1 + s), C.summand_vertices(n)
        if not rows or not cols:
            continue
        left = compose_matrices(mats[n], D.differential(n + s), alg, rows, cols) if n in mats else None
        right = (compose_matrices(C.differential(n), mats[n - 1], alg, rows, cols)
                 if n - 1 in mats and n - 1 in C.ranks else None)
        for r in range(len(rows)):
            for c in range(len(cols)):
                x = AlgebraElement.zero(rows[r], cols[c])
                if left is not None:
                    x = x + left[r][c]
                if right is not None:
                    x = x - right[r][c]
                out.extend(alg.coordinates(x))
    return out


def _homotopy_image(layout: _HomLayout, hlayout: _HomLayout, hvec):
    """Chain map ``d^D h + h d^C`` for a homotopy ``h: C -> D[shift+1]``."""
    C, D, s, alg = layout.C, layout.D, layout.shift, layout.alg
    hm = hlayout.matrices(hvec)
    mats = {}
    for n in C.degrees:
        rows, cols = D.summand_vertices(n + s), C.summand_vertices(n)
        acc = [[AlgebraElement.zero(r, c) for c in cols] for r in rows]
        if n in hm and rows:
            # h_n: C_n -> D_{n+s+1}, then d^D_{n+s+1}
            t = compose_matrices(hm[n], D.differential(n + s + 1), alg, rows, cols)
            acc = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(acc, t)]
        if n - 1 in hm and n - 1 in C.ranks and rows:
            t = compose_matrices(C.differential(n), hm[n - 1], alg, rows, cols)
            acc = [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(acc, t)]
        mats[n] = acc
    return layout.vector(mats)


def _column_space(vectors, zero, one):
    if not vectors:
        return []
    R, piv = linalg.rref(vectors, zero, one)
    return R[: len(piv)]


def chain_map_space(C, D, shift, alg):
    """``(layout, Z, B)``: chain maps ``C -> D[shift]`` and the null-homotopic ones."""
    zero, one = alg.field.zero, alg.field.one
    layout = _HomLayout(C, D, shift, alg)
    n = len(layout.vars)
    cols = [_chain_defect(layout, layout.matrices(_unit(i, n, zero, one))) for i in range(n)]
    m = len(cols[0]) if cols else 0
    A = [[cols[j][i] for j in range(n)] for i in range(m)]
    Z = linalg.nullspace(A, n, zero, one) if n else []
    hl = _HomLayout(C, D, shift + 1, alg)
    hn = len(hl.vars)
    B = _column_space([_homotopy_image(layout, hl, _unit(i, hn, zero, one)) for i in range(hn)], zero, one)
    return layout, Z, B


def homology_report(C: ProjectiveComplex, alg: TruncatedAlgebra) -> dict:
    """Homology at ``N`` and ``N + 2``; ``stable`` is true when the two agree."""
    lo = homology_dims(C, alg)
    hi = homology_dims(C, _lifted_algebra(alg))
    return {"dims": lo, "truncation": alg.N, "stable": lo == hi}


def hom_dimension(C: ProjectiveComplex, D: ProjectiveComplex, shift: int, alg: TruncatedAlgebra) -> int:
    """``dim Hom(C, D[shift])`` in the homotopy category, at the algebra's truncation."""
    zero, one = alg.field.zero, alg.field.one
    _, Z, B = chain_map_space(C, D, shift, alg)
    return linalg.rank(Z, zero, one) - linalg.rank(B, zero, one) if Z else 0


# --- truncation-stable chain maps --------------------------------------------

LIFT_MARGIN = 2


def _lifted_algebra(alg: TruncatedAlgebra) -> TruncatedAlgebra:
    hi = getattr(alg, "_lifted", None)
    if hi is None:
        hi = TruncatedAlgebra(alg.presentation, alg.N + LIFT_MARGIN, alg.field, alg.rule_budget)
        alg._lifted = hi
    return hi


def stable_chain_maps(C, D, shift, alg):
    """Chain maps at truncation ``N`` that lift to ``N + 2``, plus null-homotopic maps.

    Elements of top degree are killed by every arrow in ``A_N``, so some
    cycles exist only because of the truncation; requiring a lift removes them.
    Returns ``(layout, Z, B)`` with ``Z`` and ``B`` in row-reduced form.
    """
    zero, one = alg.field.zero, alg.field.one
    layout, _, B = chain_map_space(C, D, shift, alg)
    hi = _lifted_algebra(alg)
    hl, Zhi, _ = chain_map_space(C, D, shift, hi)
    images = []
    for v in Zhi:
        mats = hl.matrices(v)
        low = {n: [[x.truncate(alg.N) for x in row] for row in M] for n, M in mats.items()}
        images.append(layout.vector(low))
    Z = _column_space(images + B, zero, one)
    return layout, Z, B


def stable_hom_dimension(C, D, shift, alg) -> int:
    zero, one = alg.field.zero, alg.field.one
    _, Z, B = stable_chain_maps(C, D, shift, alg)
    return linalg.rank(Z, zero, one) - linalg.rank(B, zero, one) if Z else 0


# --- endomorphism algebras ------------------------------------------------------

class EndomorphismAlgebra:
    """``End(C)`` in the homotopy category, computed on a truncation.

    ``C.summands`` fixes the primitive idempotents (one per indecomposable
    summand); without it every projective summand in every degree is its
    own part.  Composition ``g ∘ f`` is recorded as the path ``g*f``.
    """

    def __init__(self, C: ProjectiveComplex, alg: TruncatedAlgebra):
        self.C, self.alg = C, alg
        zero, one = alg.field.zero, alg.field.one
        self.zero, self.one = zero, one
        self.layout, Z, B = stable_chain_maps(C, C, 0, alg)
        self.B = B
        chosen = list(B)
        self.basis = []
        for v in Z:
            if linalg.rank(chosen + [v], zero, one) > len(chosen):
                chosen.append(v)
                self.basis.append(v)
        self._frame = chosen  # B first, then the quotient basis
        self.parts = C.summands or [[(n, i)] for n in C.degrees for i in range(len(C.summand_vertices(n)))]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, vec) -> list:
        """Coordinates modulo null-homotopic maps, in terms of ``self.basis``."""
        nb = len(self.B)
        if not self._frame:
            return []
        A = [[row[i] for row in self._frame] for i in range(len(vec))]
        x = linalg.solve(A, list(vec), self.zero, self.one)
        if x is None:
            raise ValueError("vector is not a chain map")
        return x[nb:]

    def element(self, coords):
        v = [self.zero] * len(self.layout.vars)
        for c, b in zip(coords, self.basis):
            if c:
                v = [a + c * x for a, x in zip(v, b)]
        return v

    def compose(self, f, g):
        """Chain map ``g ∘ f`` (``f`` first) as a vector."""
        fm, gm = self.layout.matrices(f), self.layout.matrices(g)
        out = {}
        for n in self.C.degrees:
            vs = self.C.summand_vertices(n)
            out[n] = compose_matrices(fm[n], gm[n], self.alg, vs, vs)
        return self.layout.vector(out)

    def idempotent(self, s: int):
        mats = {}
        for n in self.C.degrees:
            vs = self.C.summand_vertices(n)
            mats[n] = [[AlgebraElement.zero(r, c) for c in vs] for r in vs]
        for n, i in self.parts[s]:
            v = self.C.summand_vertices(n)[i]
            mats[n][i][i] = AlgebraElement(v, v, {(): self.one})
        return self.layout.vector(mats)

    def _scalar_part(self, vec, s: int):
        """Average of the identity coefficients over the diagonal of part ``s``."""
        mats = self.layout.matrices(vec)
        tot = self.zero
        for n, i in self.parts[s]:
            tot += mats[n][i][i].terms.get((), self.zero)
        return tot / len(self.parts[s])

    def block(self, s: int, t: int):
        """Spanning vectors of ``e_t End e_s`` (maps from part ``s`` to part ``t``)."""
        es, et = self.idempotent(s), self.idempotent(t)
        vecs = [self.compose(self.compose(es, b), et) for b in self.basis]
        return _column_space([self._reduce(v) for v in vecs], self.zero, self.one)

    def _reduce(self, vec):
        return self.element(self.coordinates(vec))

    def radical_blocks(self):
        out = {}
        k = len(self.parts)
        for s in range(k):
            for t in range(k):
                vecs = self.block(s, t)
                if s == t:
                    es = self._reduce(self.idempotent(s))
                    vecs = [[a - self._scalar_part(v, s) * e for a, e in zip(v, es)] for v in vecs]
                    vecs = _column_space([self._reduce(v) for v in vecs], self.zero, self.one)
                out[(s, t)] = vecs
        return out

    def quiver_and_relations(self, max_length: int = 4):
        """Gabriel quiver of the endomorphism algebra and its relations up to ``max_length``.

        Returns ``(presentation, arrow_maps)``; the presentation is built on
        vertices ``"1".."k"`` with arrows named ``a1, a2, ...``.
        """
        zero, one = self.zero, self.one
        rad = self.radical_blocks()
        k = len(self.parts)
        rad2 = {}
        for (s, m), xs in rad.items():
            for (m2, t), ys in rad.items():
                if m2 != m:
                    continue
                for x in xs:
                    for y in ys:
                        rad2.setdefault((s, t), []).append(self._reduce(self.compose(x, y)))
        arrows, maps = [], {}
        for (s, t) in sorted(rad):
            span = _column_space(rad2.get((s, t), []), zero, one)
            for v in rad[(s, t)]:
                if linalg.rank(span + [v], zero, one) > len(span):
                    span = span + [v]
                    name = f"a{len(arrows) + 1}"
                    arrows.append((name, str(s + 1), str(t + 1)))
                    maps[name] = v
        from .quiver import Quiver
        q = Quiver.from_spec([str(i + 1) for i in range(k)], arrows)
        # all paths up to max_length, evaluated
        by_ends = {}
        for s in range(k):
            e = self._reduce(self.idempotent(s))
            by_ends.setdefault((str(s + 1), str(s + 1)), []).append(((), e))
        frontier = [((name,), s, t, maps[name]) for name, s, t in arrows]
        for _ in range(max_length):
            nxt = []
            for key, s, t, v in frontier:
                by_ends.setdefault((s, t), []).append((key, v))
                for name, s2, t2 in arrows:
                    if s2 == t:
                        nxt.append(((name,) + key, s, t2, self._reduce(self.compose(v, maps[name]))))
            frontier = nxt
        rels = []
        for (s, t), items in sorted(by_ends.items()):
            n = len(items)
            M = [[items[j][1][i] for j in range(n)] for i in range(len(self.layout.vars))]
            for kern in linalg.nullspace(M, n, zero, one):
                terms = {items[j][0]: kern[j] for j in range(n) if kern[j]}
                g = AlgebraElement(s, t, terms)
                if g and g.min_degree >= 2:
                    rels.append(g)
        return Presentation(q, tuple(rels), self.alg.field), maps


@dataclass
class EndomorphismReport:
    algebra: "EndomorphismAlgebra"
    raw: Presentation
    normalized: Presentation
    match: Optional[str]
    truncation: int
    warnings: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def to_json(self) -> dict:
        return {"dim": self.dim, "raw": self.raw.to_dsl(), "normalized": self.normalized.to_dsl(),
                "match": self.match, "truncation": self.truncation, "warnings": self.warnings}


def endomorphism_presentation(C: ProjectiveComplex, alg: TruncatedAlgebra, N: Optional[int] = None,
                              max_length: int = 4) -> EndomorphismReport:
    """End(C) modulo homotopy at truncation ``N``, with its quiver, relations and catalog match.

    Relations are read off among paths of length ``<= max_length`` in the
    End quiver; ``raw`` is that presentation before normalization.
    """
    from .recognition import normalize_with_match

    if N is not None and N != alg.N:
        alg = TruncatedAlgebra(alg.presentation, N, alg.field, alg.rule_budget)
    E = EndomorphismAlgebra(C, alg)
    raw, _ = E.quiver_and_relations(max_length)
    warnings = []
    if alg.N < max_length + 2:
        warnings.append(f"truncation {alg.N} may be too small to separate radical layers up to length {max_length}")
    norm, _, match = normalize_with_match(_trim_relations(raw))
    return EndomorphismReport(E, raw, norm, match, alg.N, warnings)


def _trim_relations(p: Presentation) -> Presentation:
    """Keep a minimal generating subset of the relations (consequences are dropped)."""
    from .truncated import IdealSpan

    K = max((g.max_degree for g in p.relations), default=2)
    span = IdealSpan(p.quiver, K, p.field)
    keep = []
    for g in sorted(p.relations, key=lambda g: (g.max_degree, g.min_degree)):
        if not span.contains(g):
            span.add(g)
            keep.append(g)
    return p.with_relations(keep)


# --- rational families ----------------------------------------------------------

@dataclass
class RationalFamilyComplex:
    """A complex whose differential entries are polynomials in a parameter ``t``.

    Entries are dicts ``power -> AlgebraElement``; the family is defined for
    ``t`` with ``f(t) != 0``, where ``excluded`` lists the coefficients of ``f``
    from the constant term up.
    """

    vertices: Tuple[str, ...]
    ranks: Dict[int, Tuple[int, ...]]
    differentials: Dict[int, list]
    excluded: Tuple[Fraction, ...] = (Fraction(1),)
    parameter: str = "t"

    def excluded_at(self, lam) -> bool:
        val = sum((Fraction(c) * Fraction(lam) ** i for i, c in enumerate(self.excluded)), Fraction(0))
        return val == 0

    def at(self, lam) -> ProjectiveComplex:
        return specialize_family(self, 1, lam)


def _jordan_power(m: int, lam, k: int):
    """``(lam I + J)^k`` for the upper nilpotent Jordan block ``J`` of size ``m``."""
    from math import comb

    lam = Fraction(lam)
    return [[Fraction(comb(k, b - a)) * lam ** (k - (b - a)) if 0 <= b - a <= k else Fraction(0)
             for b in range(m)] for a in range(m)]


def specialize_family(F: RationalFamilyComplex, m: int, lam) -> ProjectiveComplex:
    """Replace ``t`` by the ``m x m`` Jordan block with eigenvalue ``lam``.

    Each summand becomes ``m`` consecutive copies, so ranks scale by ``m``.
    """
    if m < 1:
        raise ValueError("block size must be positive")
    if F.excluded_at(lam):
        raise ValueError(f"parameter value {lam} is excluded from the family")
    ranks = {n: tuple(m * x for x in r) for n, r in F.ranks.items()}
    diffs = {}
    for n, M in F.differentials.items():
        rows = []
        for row in M:
            blocks = []
            for entry in row:
                blocks.append(entry)
            for a in range(m):
                out = []
                for entry in blocks:
                    for b in range(m):
                        acc = None
                        for k, x in entry.items():
                            c = _jordan_power(m, lam, k)[a][b]
                            if c:
                                acc = x.scale(c) if acc is None else acc + x.scale(c)
                        out.append(acc)
                rows.append(out)
        diffs[n] = rows
    return ProjectiveComplex(F.vertices, ranks, diffs)


# --- JSON ---------------------------------------------------------------------------

def _entry_from_json(text, src, tgt, quiver, fld, param=None):
    """Parse an entry; with ``param`` the result is a dict ``power -> element``."""
    text = str(text).strip()
    formal = parse_formal(text) if text not in ("", "0") else {}
    if param is None:
        if not formal:
            return AlgebraElement.zero(src, tgt)
        x = resolve_formal(formal, quiver, fld, vertex=src if src == tgt else None)
        if (x.source, x.target) != (src, tgt) and x:
            raise BlockShapeError(f"entry {text!r} runs {x.source}->{x.target}, expected {src}->{tgt}")
        return AlgebraElement(src, tgt, x.terms)
    split = {}
    for word, c in formal.items():
        k = sum(1 for w in word if w == param)
        rest = tuple(w for w in word if w != param)
        split.setdefault(k, {})[rest] = split.setdefault(k, {}).get(rest, 0) + c
    out = {}
    for k, f in split.items():
        f = {w: c for w, c in f.items() if c}
        if not f:
            continue
        x = resolve_formal(f, quiver, fld, vertex=src if src == tgt else None)
        if x and (x.source, x.target) != (src, tgt):
            raise BlockShapeError(f"entry {text!r} runs {x.source}->{x.target}, expected {src}->{tgt}")
        out[k] = AlgebraElement(src, tgt, x.terms)
    return out


def complex_from_json(data, presentation: Optional[Presentation] = None):
    """Load ``(presentation, complex)``; families come back as ``RationalFamilyComplex``."""
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("format", FORMAT) != FORMAT:
        raise ValueError(f"unknown complex format {data.get('format')!r}")
    if presentation is None:
        presentation = parse_presentation(data["algebra"])
    q, fld = presentation.quiver, presentation.field
    verts = tuple(q.vertices)
    ranks = {int(n): tuple(r) for n, r in data["ranks"].items()}
    fam = data.get("family")
    param = fam.get("parameter", "t") if fam else None
    tmp = ProjectiveComplex(verts, ranks)
    diffs = {}
    for n, M in data.get("differentials", {}).items():
        n = int(n)
        rows, cols = tmp.summand_vertices(n - 1), tmp.summand_vertices(n)
        if len(M) != len(rows) or any(len(r) != len(cols) for r in M):
            raise BlockShapeError(f"d_{n} must be {len(rows)}x{len(cols)}")
        diffs[n] = [[_entry_from_json(M[r][c], rows[r], cols[c], q, fld, param)
                     for c in range(len(cols))] for r in range(len(rows))]
    if fam:
        excl = tuple(Fraction(c) for c in fam.get("excluded", [1]))
        return presentation, RationalFamilyComplex(verts, ranks, diffs, excl, param)
    summands = data.get("summands")
    if summands is not None:
        summands = [[tuple(x) for x in part] for part in summands]
    return presentation, ProjectiveComplex(verts, ranks, diffs, summands)


def complex_to_json(C, presentation: Presentation) -> dict:
    out = {"format": FORMAT, "algebra": presentation.to_dsl(),
           "ranks": {str(n): list(r) for n, r in sorted(C.ranks.items())}}
    if isinstance(C, RationalFamilyComplex):
        def show(entry):
            parts = []
            for k, x in sorted(entry.items()):
                if not x:
                    continue
                body = x.to_dsl()
                if k:
                    pw = C.parameter if k == 1 else f"{C.parameter}^{k}"
                    body = f"{pw}*({body})"
                parts.append(body)
            return " + ".join(parts) or "0"
        out["differentials"] = {str(n): [[show(x) for x in row] for row in M] for n, M in sorted(C.differentials.items())}
        out["family"] = {"parameter": C.parameter, "excluded": [str(c) for c in C.excluded]}
        return out
    out["differentials"] = {str(n): [[x.to_dsl() for x in row] for row in M] for n, M in sorted(C.differentials.items())}
    if C.summands is not None:
        out["summands"] = [[list(x) for x in part] for part in C.summands]
    return out


# --- shipped complexes ------------------------------------------------------------

def tilting_complex_T19():
    """``[A_1 -d-> A_2]`` (degrees 0, -1) plus the stalk ``A_1`` over the ninth nodal algebra."""
    from .catalog import get_entry

    p = get_entry("T1.9").presentation
    d = AlgebraElement("2", "1", {("d",): p.field.one})
    C = ProjectiveComplex(("1", "2"), {0: (2, 0), -1: (0, 1)}, {0: [[d, None]]},
                          [[(0, 0), (-1, 0)], [(0, 1)]])
    return p, C


def shipped_families():
    """Two one-parameter families of minimal complexes over local algebras."""
    from .catalog import get_entry

    out = {}
    for key, eid, ranks, diffs in (
        ("L4", "L4", {0: (1,), -1: (1,)}, {"0": [["x + t*y"]]}),
        ("L5", "L5", {1: (1,), 0: (1,), -1: (1,)}, {"1": [["x"]], "0": [["x + t*x*y*x"]]}),
    ):
        p = get_entry(eid).presentation
        data = {"format": FORMAT, "algebra": p.to_dsl(), "ranks": {str(n): list(r) for n, r in ranks.items()},
                "differentials": diffs, "family": {"parameter": "t", "excluded": ["0", "1"]}}
        out[key] = complex_from_json(data, p)
    return out
