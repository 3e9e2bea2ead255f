"""Special biserial / gentle / nodal predicates and presentation normalization.

Normalization applies three kinds of moves, always in this order:

* ``rescale``: multiply an arrow by a nonzero scalar so that homogeneous
  binomial generators read ``p - q``;
* ``shift``: replace an arrow ``x`` by ``x + f`` with ``f`` in rad^2 when a
  generator factors as ``y·(λx + f)`` or ``(λx + f)·y``;
* ``relabel``: rename vertices and arrows onto the standard quivers.

The result is compared through a canonical key (the reduced echelon basis
of the ideal truncated at degree ``K``); ties are broken towards catalog
entries and then towards the lexicographically smallest key.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .quiver import AlgebraElement, Arrow, Presentation, PresentationError, Quiver, path_order_key
from .truncated import IdealSpan, TruncatedAlgebra

LOCAL_NAMES = "xyzuvw"


@dataclass
class PredicateReport:
    verdict: bool
    tag: Optional[str] = None
    witness: object = None
    moves: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "tag": self.tag, "witness": self.witness,
                "moves": [m.to_json() for m in self.moves]}


@dataclass(frozen=True)
class SubstitutionMove:
    """One invertible change of generators.

    ``rescale``: ``arrow -> scalar * arrow``.
    ``shift``: the arrow is replaced by ``arrow + element`` (``element`` in rad^2,
    same endpoints); ``degree`` is the truncation used to invert the change.
    ``relabel``: ``mapping`` sends old vertex ids and arrow ids to new ones.
    """

    kind: str
    arrow: Optional[str] = None
    scalar: object = None
    element: Optional[AlgebraElement] = None
    mapping: Optional[Tuple[Tuple[str, str], ...]] = None
    degree: Optional[int] = None

    def __post_init__(self):
        if self.kind == "rescale" and not self.scalar:
            raise ValueError("rescale needs a nonzero scalar")
        if self.kind == "shift":
            el = self.element
            if el is None or (el.min_degree is not None and el.min_degree < 2):
                raise ValueError("shift element must lie in rad^2")
        if self.kind not in ("rescale", "shift", "relabel"):
            raise ValueError(f"unknown move {self.kind!r}")

    def inverse(self) -> "SubstitutionMove":
        if self.kind == "rescale":
            return SubstitutionMove("rescale", self.arrow, 1 / self.scalar)
        if self.kind == "relabel":
            return SubstitutionMove("relabel", mapping=tuple((b, a) for a, b in self.mapping))
        raise NotImplementedError("a shift is inverted by composing with its power-series inverse")

    def to_json(self) -> dict:
        if self.kind == "rescale":
            return {"kind": "rescale", "arrow": self.arrow, "scalar": str(self.scalar)}
        if self.kind == "shift":
            return {"kind": "shift", "arrow": self.arrow, "element": self.element.to_dsl(), "degree": self.degree}
        return {"kind": "relabel", "mapping": dict(self.mapping)}


# --- predicates -------------------------------------------------------------

def _products(p: Presentation, alg: TruncatedAlgebra):
    """Map ``(b, a) -> True`` iff ``b·a`` (first ``a``, then ``b``) survives in the algebra."""
    out = {}
    for b in p.quiver.arrows:
        for a in p.quiver.arrows_to(b.source):
            out[(b.name, a.name)] = not alg.is_zero(alg.element(b.name, a.name))
    return out


def _algebra(p: Presentation, alg=None) -> TruncatedAlgebra:
    if alg is not None:
        return alg
    deg = max((g.max_degree or 0 for g in p.relations), default=2)
    return TruncatedAlgebra(p, max(4, deg + 2))


def is_special_biserial(p: Presentation, alg: TruncatedAlgebra | None = None) -> PredicateReport:
    q = p.quiver
    for v in q.vertices:
        if len(q.arrows_to(v)) > 2 or len(q.arrows_from(v)) > 2:
            return PredicateReport(False, "G1", {"vertex": v, "in": len(q.arrows_to(v)), "out": len(q.arrows_from(v))})
    alg = _algebra(p, alg)
    alive = _products(p, alg)
    for b in q.arrows:
        before = [a.name for a in q.arrows_to(b.source) if alive[(b.name, a.name)]]
        if len(before) > 1:
            return PredicateReport(False, "G2", {"arrow": b.name, "side": "before", "arrows": before})
        after = [c.name for c in q.arrows_from(b.target) if alive[(c.name, b.name)]]
        if len(after) > 1:
            return PredicateReport(False, "G2", {"arrow": b.name, "side": "after", "arrows": after})
    return PredicateReport(True)


def _length_two_zero_paths(p: Presentation, alg: TruncatedAlgebra):
    out = []
    for (b, a), live in _products(p, alg).items():
        if not live:
            out.append((b, a))
    return out


def _gentle_conditions(p: Presentation, alg: TruncatedAlgebra) -> PredicateReport:
    sb = is_special_biserial(p, alg)
    if not sb:
        return sb
    q = p.quiver
    zeros = _length_two_zero_paths(p, alg)
    # G3: the ideal is generated by the length-two paths it contains
    mono = Presentation(q, tuple(AlgebraElement.from_path(q, k, alg.field.one) for k in zeros), alg.field)
    if TruncatedAlgebra(mono, alg.N).dim() != alg.dim():
        return PredicateReport(False, "G3", {"zero_paths": ["*".join(k) for k in zeros]})
    zs = set(zeros)
    for b in q.arrows:
        before = [a.name for a in q.arrows_to(b.source) if (b.name, a.name) in zs]
        if len(before) > 1:
            return PredicateReport(False, "G4", {"arrow": b.name, "side": "before", "arrows": before})
        after = [c.name for c in q.arrows_from(b.target) if (c.name, b.name) in zs]
        if len(after) > 1:
            return PredicateReport(False, "G4", {"arrow": b.name, "side": "after", "arrows": after})
    return PredicateReport(True)


def is_gentle(p: Presentation, alg: TruncatedAlgebra | None = None) -> PredicateReport:
    """Gentle check on ``p``; a non-monomial presentation is retried after normalization."""
    nonmono = [g for g in p.relations if not g.is_monomial()]
    if not nonmono:
        return _gentle_conditions(p, _algebra(p, alg))
    q, moves, _ = normalize_with_match(p)
    if any(not g.is_monomial() for g in q.relations):
        bad = next(g for g in q.relations if not g.is_monomial())
        return PredicateReport(False, "non-monomial", {"generator": bad.to_dsl()}, moves)
    rep = _gentle_conditions(q, _algebra(q))
    rep.moves = moves
    return rep


def is_nodal(p: Presentation) -> PredicateReport:
    """Catalog test: normalize and look for L3, L4, L5 or a nodal two-point entry."""
    from .catalog import get_entry

    if len(p.quiver.vertices) > 2:
        raise PresentationError("nodal recognition covers local and two-point algebras only")
    _, moves, match = normalize_with_match(p)
    if match and get_entry(match).nodal:
        return PredicateReport(True, None, {"catalog": match}, moves)
    return PredicateReport(False, "catalog-miss", {"catalog": match}, moves)


# --- substitution machinery ---------------------------------------------------

def substitute(g: AlgebraElement, images: Dict[str, AlgebraElement], degree: int | None = None,
               one=Fraction(1)) -> AlgebraElement:
    """Replace arrows by elements with the same endpoints, truncating above ``degree``."""
    total = {}
    for key, c in g.terms.items():
        if not key:
            total[key] = total.get(key, 0) + c
            continue
        acc = None
        for name in key:
            img = images.get(name)
            if img is None:
                img = AlgebraElement("?", "?", {(name,): one})
            acc = dict(img.terms) if acc is None else _concat_terms(acc, img.terms, degree)
        for k, v in acc.items():
            total[k] = total.get(k, 0) + c * v
    out = AlgebraElement(g.source, g.target, total)
    return out.truncate(degree) if degree is not None else out


def _concat_terms(left, right, degree):
    out = {}
    for p, c in left.items():
        for q, d in right.items():
            if degree is not None and len(p) + len(q) > degree:
                continue
            out[p + q] = out.get(p + q, 0) + c * d
    return out


def _shift_inverse(x: Arrow, f: AlgebraElement, degree: int, one) -> AlgebraElement:
    """``φ`` with ``φ + f(φ) = x`` up to ``degree``, where ``f(φ)`` substitutes ``φ`` for ``x``."""
    base = AlgebraElement(x.source, x.target, {(x.name,): one})
    phi = base
    for _ in range(degree):
        phi = base - substitute(f, {x.name: phi}, degree, one)
    return phi


def apply_move(p: Presentation, m: SubstitutionMove) -> Presentation:
    one = p.field.one
    q = p.quiver
    if m.kind == "rescale":
        a = q.arrow(m.arrow)
        img = AlgebraElement(a.source, a.target, {(a.name,): p.field(m.scalar)})
        return p.with_relations(substitute(g, {a.name: img}, None, one) for g in p.relations)
    if m.kind == "shift":
        a = q.arrow(m.arrow)
        phi = _shift_inverse(a, m.element, m.degree, one)
        return p.with_relations(substitute(g, {a.name: phi}, m.degree, one) for g in p.relations)
    mp = dict(m.mapping)
    arrows = [Arrow(mp.get(a.name, a.name), mp.get(a.source, a.source), mp.get(a.target, a.target))
              for a in q.arrows]
    quiver = Quiver(tuple(sorted(mp.get(v, v) for v in q.vertices)), tuple(_standard_order(arrows)))
    rels = []
    for g in p.relations:
        terms = {tuple(mp.get(n, n) for n in k): c for k, c in g.terms.items()}
        rels.append(AlgebraElement(mp.get(g.source, g.source), mp.get(g.target, g.target), terms))
    return Presentation(quiver, tuple(rels), p.field)


def _standard_order(arrows):
    triples = {(a.name, a.source, a.target) for a in arrows}
    for shape in _standard_shapes().values():
        if set(shape) == triples:
            rank = {n: i for i, (n, _, _) in enumerate(shape)}
            return sorted(arrows, key=lambda a: rank[a.name])
    return sorted(arrows, key=lambda a: a.name)


def apply_moves(p: Presentation, moves) -> Presentation:
    for m in moves:
        p = apply_move(p, m)
    return p


# --- canonical forms ---------------------------------------------------------

def key_degree(p: Presentation) -> int:
    return max(4, max((g.max_degree or 0 for g in p.relations), default=0) + 2)


def _ideal_rows(p: Presentation, K: int):
    alg = TruncatedAlgebra(p, K)
    rows = []
    for (s, t), ech in alg._echelon.items():
        for piv, row in ech.rows.items():
            rows.append(AlgebraElement(s, t, row))
    rows.sort(key=lambda r: (path_order_key(r.leading()[0]), r.source, r.target))
    return rows


def ideal_key(p: Presentation, K: int | None = None) -> tuple:
    K = key_degree(p) if K is None else K
    rows = _ideal_rows(p, K)
    shape = (p.quiver.vertices, tuple(sorted((a.name, a.source, a.target) for a in p.quiver.arrows)))
    return (shape,) + tuple(
        (r.source, r.target, tuple(("*".join(k), str(c)) for k, c in r.sorted_terms())) for r in rows
    )


def canonical_generators(p: Presentation, K: int | None = None) -> Presentation:
    """Minimal generators read off the reduced echelon basis of the truncated ideal."""
    K = key_degree(p) if K is None else K
    span = IdealSpan(p.quiver, K, p.field)
    gens = []
    for r in _ideal_rows(p, K):
        if span.contains(r):
            continue
        span.add(r)
        gens.append(r)
    return Presentation(p.quiver, tuple(gens), p.field)


def _term_count(p: Presentation) -> int:
    return sum(len(g.terms) for g in p.relations)


# --- rescaling ----------------------------------------------------------------

def _arrow_counts(key):
    out = {}
    for n in key:
        out[n] = out.get(n, 0) + 1
    return out


def _rescale_moves(p: Presentation) -> List[SubstitutionMove]:
    """Scalars making each homogeneous binomial generator read ``p - q``.

    Rescaling arrow ``x`` by ``s_x`` turns ``c1·k1 + c2·k2`` into a multiple of
    ``k1 - k2`` exactly when ``prod s_x^{v_x} = -c1/c2`` with ``v`` the
    exponent difference of ``k2`` and ``k1``.  The multiplicative system is
    solved by Gauss-Jordan elimination with ±1 pivots; free arrows keep scale 1
    and rows that cannot be pivoted this way are left alone.
    """
    rows = []
    for g in p.relations:
        if len(g.terms) != 2:
            continue
        (k1, c1), (k2, c2) = g.sorted_terms()
        if len(k1) != len(k2):
            continue
        v = _arrow_counts(k2)
        for n, m in _arrow_counts(k1).items():
            v[n] = v.get(n, 0) - m
        v = {n: m for n, m in v.items() if m}
        if v:
            rows.append((v, -c1 / c2))
    pivot_rows = []
    while rows:
        v, r = rows.pop(0)
        cand = sorted(n for n, m in v.items() if abs(m) == 1)
        if not cand:
            continue
        x = cand[0]
        sign = v[x]

        def eliminate(w, rw):
            k = w.get(x, 0) * sign
            if not k:
                return w, rw
            nw = dict(w)
            for n, m in v.items():
                nw[n] = nw.get(n, 0) - k * m
            return {n: m for n, m in nw.items() if m}, rw / r ** k

        rows = [eliminate(w, rw) for w, rw in rows]
        rows = [(w, rw) for w, rw in rows if w]
        pivot_rows = [(y, *eliminate(w, rw)) for y, w, rw in pivot_rows]
        pivot_rows.append((x, v, r))
    moves = []
    for x, v, r in sorted(pivot_rows):
        s = r if v[x] == 1 else 1 / r
        if s != 1:
            moves.append(SubstitutionMove("rescale", x, p.field(s)))
    return moves


def _off_form(p: Presentation) -> int:
    """Homogeneous binomial generators not of the shape ``k1 - k2``."""
    n = 0
    for g in p.relations:
        if len(g.terms) == 2:
            (k1, c1), (k2, c2) = g.sorted_terms()
            if len(k1) == len(k2) and c1 != -c2:
                n += 1
    return n


def _canonical_rescale(p: Presentation, K: int):
    """``_rescale_moves`` followed by the best sign flip of the arrows.

    Rows the ±1-pivot solver leaves alone make its output depend on the input
    scaling; minimizing over sign flips removes that dependence.
    """
    moves = _rescale_moves(p)
    base = canonical_generators(apply_moves(p, moves), K)
    if not _off_form(base):
        return moves, base
    names = sorted({n for g in base.relations if len(g.terms) == 2 for k in g.terms for n in k})
    if len(names) > 6:
        return moves, base
    cands = []
    for mask in itertools.product((False, True), repeat=len(names)):
        flips = [SubstitutionMove("rescale", x, p.field(-1)) for x, f in zip(names, mask) if f]
        cands.append((_off_form(apply_moves(base, flips)), sum(mask), flips))
    fewest = min(c[0] for c in cands)
    best = None
    for off, weight, flips in cands:
        if off != fewest:
            continue
        cand = canonical_generators(apply_moves(base, flips), K) if flips else base
        score = (_sort_key(ideal_key(cand, K)), weight)
        if best is None or score < best[0]:
            best = (score, flips, cand)
    return moves + best[1], best[2]

# --- shifts -------------------------------------------------------------------

def _shift_candidates(p: Presentation):
    """Arrows ``x`` and tails ``f`` with a generator factoring as ``y·(λx + f)`` or ``(λx + f)·y``.

    Terms of a generator are grouped by their outermost arrow on either side;
    a group qualifies when its cofactor has exactly one degree-one term.
    """
    q = p.quiver
    seen = set()
    for g in p.relations:
        for side in ("left", "right"):
            groups: Dict[str, dict] = {}
            for key, c in g.terms.items():
                if len(key) < 2:
                    continue
                y, rest = (key[0], key[1:]) if side == "left" else (key[-1], key[:-1])
                groups.setdefault(y, {})[rest] = c
            for y, cof in sorted(groups.items()):
                linear = [(k, c) for k, c in cof.items() if len(k) == 1]
                if len(linear) != 1:
                    continue
                (xk, lam), = linear
                x = q.arrow(xk[0])
                tail = {k: c / lam for k, c in cof.items() if len(k) >= 2}
                if not tail:
                    continue
                f = AlgebraElement(x.source, x.target, tail)
                sig = (x.name, f)
                if sig in seen:
                    continue
                seen.add(sig)
                yield x.name, f


def _shift_moves(p: Presentation, K: int, max_rounds: int = 12):
    moves = []
    cur = canonical_generators(p, K)
    cost = _term_count(cur)
    for _ in range(max_rounds):
        improved = False
        for x, f in _shift_candidates(cur):
            m = SubstitutionMove("shift", x, element=f, degree=K)
            nxt = canonical_generators(apply_move(cur, m), K)
            if _term_count(nxt) < cost:
                moves.append(m)
                cur, cost = nxt, _term_count(nxt)
                improved = True
                break
        if not improved:
            break
    return moves, cur


# --- relabeling ---------------------------------------------------------------

def _standard_shapes():
    from .catalog import standard_quivers

    out = {}
    for name, arrows in standard_quivers().items():
        triples = []
        for part in arrows.split(","):
            n, rest = part.strip().split(":")
            s, t = rest.split("->")
            triples.append((n.strip(), s.strip(), t.strip()))
        out[name] = triples
    return out


def quiver_shape(q: Quiver) -> Optional[str]:
    """``Q1``..``Q10`` for two-point quivers in the standard list, ``local`` for one vertex."""
    if len(q.vertices) == 1:
        return "local"
    for name, _ in _relabelings(q):
        return name
    return None


def _relabelings(q: Quiver):
    """Yield ``(shape, mapping)`` for every identification of ``q`` with a standard quiver."""
    if len(q.vertices) == 1:
        v = q.vertices[0]
        loops = [a.name for a in q.arrows]
        if len(loops) > len(LOCAL_NAMES):
            return
        for perm in itertools.permutations(LOCAL_NAMES[: len(loops)]):
            yield "local", ((v, "1"),) + tuple(zip(loops, perm))
        return
    if len(q.vertices) != 2:
        return
    shapes = _standard_shapes()
    for vs in (q.vertices, q.vertices[::-1]):
        vmap = {vs[0]: "1", vs[1]: "2"}
        classes: Dict[Tuple[str, str], List[str]] = {}
        for a in q.arrows:
            classes.setdefault((vmap[a.source], vmap[a.target]), []).append(a.name)
        for name, triples in shapes.items():
            std: Dict[Tuple[str, str], List[str]] = {}
            for n, s, t in triples:
                std.setdefault((s, t), []).append(n)
            if {k: len(v) for k, v in std.items()} != {k: len(v) for k, v in classes.items()}:
                continue
            keys = sorted(std)
            for combo in itertools.product(*(itertools.permutations(std[k]) for k in keys)):
                mp = list(vmap.items())
                for k, names in zip(keys, combo):
                    mp.extend(zip(classes[k], names))
                yield name, tuple(mp)


@lru_cache(maxsize=None)
def _catalog_keys(K: int):
    from .catalog import algebra_entries

    out = {}
    for e in algebra_entries():
        out.setdefault(ideal_key(e.presentation, K), e.id)
    return out


def _is_identity(mapping) -> bool:
    return all(a == b for a, b in mapping)


def _sort_key(key):
    return [key[0]] + [(s, t, [(w, c) for w, c in terms]) for s, t, terms in key[1:]]


def tidy(p: Presentation, K: int | None = None):
    """Canonical generators, or the catalog presentation when the ideal matches one."""
    from .catalog import get_entry

    K = key_degree(p) if K is None else K
    match = _catalog_keys(K).get(ideal_key(p, K))
    if match is not None:
        return get_entry(match).presentation, match
    return canonical_generators(p, K), None


_NORMALIZE_CACHE: Dict[tuple, tuple] = {}


def normalize_with_match(p: Presentation):
    """``(normalized presentation, move log, matched catalog id or None)``.

    A single pass is not always a projection (scalars are only fixed up to
    square classes), so passes are iterated until the ideal repeats and the
    smallest member of the cycle is returned.
    """
    cache_key = (p.quiver, tuple(p.relations), repr(p.field))
    hit = _NORMALIZE_CACHE.get(cache_key)
    if hit is not None:
        return hit
    K = key_degree(p)
    states, seen, cur, log = [], {}, p, []
    for _ in range(8):
        out, moves, match = _normalize_once(cur, K)
        log = log + moves
        key = ideal_key(out, K)
        if key in seen:
            cycle = states[seen[key]:]
            break
        seen[key] = len(states)
        states.append((_sort_key(key), out, log, match))
        cur = out
    else:
        cycle = states[-1:]
    _, out, log, match = min(cycle, key=lambda t: t[0])
    result = (out, log, match)
    _NORMALIZE_CACHE[cache_key] = result
    return result


def _normalize_once(p: Presentation, K: int):
    cur = canonical_generators(p, K)
    moves, cur = _canonical_rescale(cur, K)
    shifts, cur = _shift_moves(cur, K)
    moves += shifts
    cat = _catalog_keys(K)
    best = None
    for shape, mapping in _relabelings(cur.quiver):
        cand = apply_move(cur, SubstitutionMove("relabel", mapping=mapping))
        # rescaling is not canonical across labelings, so redo it per candidate
        rescale, cand = _canonical_rescale(cand, K)
        key = ideal_key(cand, K)
        score = (0 if key in cat else 1, _sort_key(key), 0 if _is_identity(mapping) else 1)
        if best is None or score < best[0]:
            best = (score, mapping, rescale)
    if best is not None:
        if not _is_identity(best[1]):
            moves.append(SubstitutionMove("relabel", mapping=best[1]))
        moves += best[2]
    out, match = tidy(apply_moves(p, moves), K)
    return out, moves, match


def normalize_presentation(p: Presentation):
    """Normalized presentation and the move log that produces it."""
    out, moves, _ = normalize_with_match(p)
    return out, moves
