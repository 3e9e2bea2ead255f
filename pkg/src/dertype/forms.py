"""Tits forms of quivers and boxes, and Dynkin/Euclidean graph recognition."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .quiver import Quiver


@dataclass(frozen=True)
class BoxSpec:
    """Vertices with solid and dashed arrows; a quiver is a box with no dashed arrows.

    Arrows are ``(name, source, target)`` triples.
    """

    vertices: Tuple[str, ...]
    solid: Tuple[Tuple[str, str, str], ...] = ()
    dashed: Tuple[Tuple[str, str, str], ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "solid", tuple((str(n), str(s), str(t)) for n, s, t in self.solid))
        object.__setattr__(self, "dashed", tuple((str(n), str(s), str(t)) for n, s, t in self.dashed))
        vs = set(self.vertices)
        for n, s, t in self.solid + self.dashed:
            if s not in vs or t not in vs:
                raise ValueError(f"arrow {n} has an endpoint outside the vertex set")

    @classmethod
    def from_quiver(cls, q: Quiver, name="") -> "BoxSpec":
        return cls(q.vertices, tuple((a.name, a.source, a.target) for a in q.arrows), (), name)

    def to_quiver(self) -> Quiver:
        if self.dashed:
            raise ValueError("a box with dashed arrows is not a quiver")
        return Quiver.from_spec(self.vertices, self.solid)

    def gram(self) -> np.ndarray:
        """Integer matrix ``G`` with ``2 q(d) = d^T G d``."""
        n = len(self.vertices)
        idx = {v: i for i, v in enumerate(self.vertices)}
        G = 2 * np.eye(n, dtype=np.int64)
        for _, s, t in self.solid:
            G[idx[s], idx[t]] -= 1
            G[idx[t], idx[s]] -= 1
        for _, s, t in self.dashed:
            G[idx[s], idx[t]] += 1
            G[idx[t], idx[s]] += 1
        return G


def _vector(b: BoxSpec, d) -> list:
    if isinstance(d, dict):
        if set(map(str, d)) != set(b.vertices):
            raise ValueError("dimension vector is not indexed by the box's vertices")
        d = {str(k): v for k, v in d.items()}
        return [int(d[v]) for v in b.vertices]
    d = list(d)
    if len(d) != len(b.vertices):
        raise ValueError(f"dimension vector has {len(d)} entries, box has {len(b.vertices)} vertices")
    if any(x < 0 for x in d):
        raise ValueError("dimension vectors are non-negative")
    return [int(x) for x in d]


def tits_form(b: BoxSpec, d) -> int:
    """``sum d_i^2 - sum_solid d_s d_t + sum_dashed d_s d_t``."""
    v = _vector(b, d)
    idx = {x: i for i, x in enumerate(b.vertices)}
    q = sum(x * x for x in v)
    q -= sum(v[idx[s]] * v[idx[t]] for _, s, t in b.solid)
    q += sum(v[idx[s]] * v[idx[t]] for _, s, t in b.dashed)
    return q


def find_negative_vector(b: BoxSpec, bound: int) -> Optional[Tuple[int, ...]]:
    """Lexicographically first ``d`` in ``[0, bound]^n`` with ``q(d) <= -1``."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    n = len(b.vertices)
    G = b.gram()
    # split on the first coordinate to keep memory bounded
    rest = np.indices((bound + 1,) * (n - 1)).reshape(n - 1, -1).T if n > 1 else np.zeros((1, 0), dtype=np.int64)
    for first in range(bound + 1):
        D = np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest])
        q2 = np.einsum("ij,jk,ik->i", D, G, D)
        hits = np.nonzero(q2 <= -2)[0]
        if hits.size:
            return tuple(int(x) for x in D[hits[0]])
    return None


# --- graph recognition ------------------------------------------------------

def _underlying(q) -> Tuple[list, Counter, Counter]:
    if isinstance(q, BoxSpec):
        verts, arrows = list(q.vertices), [(s, t) for _, s, t in q.solid]
    else:
        verts, arrows = list(q.vertices), [(a.source, a.target) for a in q.arrows]
    loops = Counter(s for s, t in arrows if s == t)
    edges = Counter(frozenset((s, t)) for s, t in arrows if s != t)
    return verts, loops, edges


def _components(verts, edges):
    adj = {v: set() for v in verts}
    for e in edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    seen, comps = set(), []
    for v in verts:
        if v in seen:
            continue
        comp, stack = [], [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def _arms(adj, center):
    """Lengths (in vertices, excluding the center) of the paths leaving ``center``."""
    out = []
    for start in adj[center]:
        prev, cur, n = center, start, 1
        while True:
            nxt = [y for y in adj[cur] if y != prev]
            if len(nxt) != 1:
                if len(nxt) > 1:
                    return None
                break
            prev, cur, n = cur, nxt[0], n + 1
        out.append(n)
    return sorted(out)


def diagram_type(q) -> str:
    """Name of the underlying graph of a connected quiver.

    Returns a Dynkin name (``A5``, ``D4``, ``E6``), a Euclidean name prefixed
    with ``~`` (``~A0`` for a single loop, ``~A1`` for the Kronecker quiver),
    or ``"wild"``.
    """
    verts, loops, edges = _underlying(q)
    n = len(verts)
    if len(_components(verts, edges)) != 1:
        raise ValueError("quiver is not connected")
    n_loops = sum(loops.values())
    if n_loops:
        return "~A0" if n == 1 and n_loops == 1 else "wild"
    n_edges = sum(edges.values())
    if any(m > 1 for m in edges.values()):
        return "~A1" if n == 2 and n_edges == 2 else "wild"
    if n_edges >= n:
        # a single cycle through every vertex, or worse
        deg = Counter()
        for e in edges:
            for v in e:
                deg[v] += 1
        if n_edges == n and all(deg[v] == 2 for v in verts):
            return f"~A{n - 1}"
        return "wild"
    # trees
    adj = {v: set() for v in verts}
    for e in edges:
        a, b = tuple(e)
        adj[a].add(b)
        adj[b].add(a)
    branch = [v for v in verts if len(adj[v]) >= 3]
    if not branch:
        return f"A{n}"
    if len(branch) == 1:
        c = branch[0]
        arms = _arms(adj, c)
        if len(adj[c]) == 4:
            return "~D4" if arms == [1, 1, 1, 1] else "wild"
        if len(adj[c]) > 4 or arms is None:
            return "wild"
        p, r, s = (x + 1 for x in arms)
        total = Fraction(1, p) + Fraction(1, r) + Fraction(1, s)
        if total > 1:
            if arms[0] == 1 and arms[1] == 1:
                return f"D{n}"
            return f"E{n}"
        if total == 1:
            return f"~E{n - 1}"
        return "wild"
    if len(branch) == 2 and all(len(adj[v]) == 3 for v in branch):
        leaves = [v for v in verts if len(adj[v]) == 1]
        if len(leaves) == 4 and all(len(adj[next(iter(adj[l]))]) == 3 for l in leaves):
            return f"~D{n - 1}"
    return "wild"


def is_dynkin(q) -> bool:
    return diagram_type(q)[0] in "ADE"


def is_euclidean(q) -> bool:
    return diagram_type(q).startswith("~")


def is_wild_hereditary(q: Quiver) -> bool:
    """True iff the underlying graph is neither Dynkin nor Euclidean.

    A positive answer is cross-checked by an exhaustive negative-vector search.
    """
    wild = diagram_type(q) == "wild"
    if wild and len(q.vertices) <= 9:
        box = BoxSpec.from_quiver(q) if isinstance(q, Quiver) else q
        if find_negative_vector(box, 5) is None:
            raise AssertionError("graph is wild but no negative vector was found")
    return wild


# --- shipped shapes ------------------------------------------------------------

def _box(name, n, solid, dashed=()):
    return BoxSpec(tuple(str(i) for i in range(1, n + 1)), tuple(solid), tuple(dashed), name)


BOXES: Dict[str, BoxSpec] = {
    "W1": _box("W1", 3, [("p", 1, 2), ("q", 1, 2), ("s", 2, 3)]),
    "W2": _box("W2", 5, [("p", 1, 2), ("t", 1, 4), ("q", 3, 4), ("s", 3, 2), ("r", 4, 5)]),
    "W3": _box("W3", 7, [("p1", 1, 2), ("p2", 2, 3), ("p3", 3, 4), ("q", 5, 2), ("r", 6, 3), ("s", 7, 4)]),
    "W4": _box("W4", 8, [("p1", 1, 2), ("p2", 2, 3), ("p3", 3, 4), ("p4", 4, 5), ("p5", 5, 6),
                         ("q", 3, 7), ("r", 5, 8)]),
    "W5": _box("W5", 9,
               [("p1", 1, 2), ("p2", 1, 3), ("q1", 2, 4), ("q2", 3, 4), ("r1", 4, 5),
                ("p3", 5, 6), ("p4", 5, 7), ("q3", 6, 8), ("q4", 7, 8), ("r2", 8, 9)],
               [("phi", 3, 2), ("psi", 7, 6)]),
    "W6": _box("W6", 8,
               [("p1", 1, 2), ("p2", 1, 3), ("q1", 2, 4), ("q2", 3, 4),
                ("p3", 4, 5), ("p4", 4, 6), ("q3", 5, 7), ("q4", 6, 7), ("r", 7, 8)],
               [("phi", 3, 2), ("psi", 6, 5)]),
}


def separated_quiver(q: Quiver) -> Quiver:
    """Vertices ``i`` and ``i'``; each arrow ``i -> j`` becomes ``i -> j'``."""
    verts = list(q.vertices) + [v + "'" for v in q.vertices]
    return Quiver.from_spec(verts, [(a.name, a.source, a.target + "'") for a in q.arrows])


def separated_components(q: Quiver):
    sep = separated_quiver(q)
    verts, _, edges = _underlying(sep)
    out = []
    for comp in _components(verts, edges):
        cs = set(comp)
        out.append(Quiver.from_spec(comp, [(a.name, a.source, a.target) for a in sep.arrows if a.source in cs]))
    return out


def radical_square_zero_is_tame(q: Quiver):
    """Tameness of ``kQ/rad^2`` via its separated quiver.

    Returns ``(tame, certificate)``; a wild answer carries a negative Tits
    vector on an offending component.
    """
    for comp in separated_components(q):
        kind = diagram_type(comp)
        if kind == "wild":
            box = BoxSpec.from_quiver(comp)
            d = find_negative_vector(box, 3)
            return False, {"component": list(comp.vertices), "diagram": kind, "vector": d,
                           "form": tits_form(box, d) if d else None}
    return True, None
