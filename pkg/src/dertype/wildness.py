"""Wildness witnesses: bimodule data for the wild shapes, complex templates,
their symbolic certificates and a small empirical strict-wildness gate."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .complexes import ProjectiveComplex, vector_rank
from .dsl import evaluate_formal, parse_formal, parse_presentation
from .fields import QQ, PrimeField
from .forms import BOXES, BoxSpec
from .quiver import AlgebraElement, Presentation, PresentationError
from .truncated import TruncatedAlgebra

GATE_FIELD = PrimeField(101)


# --- modules over the free algebra on x, y ---------------------------------------

@dataclass
class ModulePair:
    """A finite-dimensional module over ``k<x, y>``: two square matrices."""

    X: list
    Y: list
    field: object = QQ

    def __post_init__(self):
        f = self.field
        self.X = [[f(v) for v in row] for row in self.X]
        self.Y = [[f(v) for v in row] for row in self.Y]
        n = len(self.X)
        if any(len(r) != n for r in self.X) or len(self.Y) != n or any(len(r) != n for r in self.Y):
            raise ValueError("X and Y must be square of the same size")

    @property
    def n(self) -> int:
        return len(self.X)

    def direct_sum(self, other: "ModulePair") -> "ModulePair":
        return ModulePair(_block_diag(self.X, other.X, self.field), _block_diag(self.Y, other.Y, self.field), self.field)

    def conjugate(self, S) -> "ModulePair":
        """``(S X S^-1, S Y S^-1)``."""
        f = self.field
        S = [[f(v) for v in row] for row in S]
        Si = _inverse(S, f)
        mul = lambda A, B: linalg.matmul(A, B, f.zero)
        return ModulePair(mul(mul(S, self.X), Si), mul(mul(S, self.Y), Si), f)

    def to_json(self) -> dict:
        show = lambda M: [[str(_plain(v)) for v in row] for row in M]
        return {"n": self.n, "X": show(self.X), "Y": show(self.Y)}

    @classmethod
    def from_json(cls, data, field=QQ) -> "ModulePair":
        if isinstance(data, str):
            data = json.loads(data)
        conv = lambda M: [[Fraction(v) for v in row] for row in M]
        return cls(conv(data["X"]), conv(data["Y"]), field)


def _plain(v):
    return getattr(v, "v", v)


def _block_diag(A, B, f):
    n, m = len(A), len(B)
    out = [[f.zero] * (n + m) for _ in range(n + m)]
    for i in range(n):
        for j in range(n):
            out[i][j] = A[i][j]
    for i in range(m):
        for j in range(m):
            out[n + i][n + j] = B[i][j]
    return out


def _inverse(S, f):
    n = len(S)
    aug = [list(row) + [f.one if i == j else f.zero for j in range(n)] for i, row in enumerate(S)]
    R, piv = linalg.rref(aug, f.zero, f.one)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is not invertible")
    return [row[n:] for row in R[:n]]


def _to_int(M, p):
    return np.array([[int(_plain(v)) % p for v in row] for row in M], dtype=np.int64).reshape(len(M), -1)


# --- invertible elements of a matrix space ------------------------------------------

EXHAUSTIVE_LIMIT = 2000
RANDOM_SAMPLES = 64


def find_invertible(basis, p: int, rng: random.Random):
    """Search ``span(basis)`` for a tuple of invertible square blocks.

    ``basis`` is a list of tuples of integer matrices (one tuple per spanning
    element).  Exhaustive over the projective space when it has at most
    ``EXHAUSTIVE_LIMIT`` points, otherwise ``RANDOM_SAMPLES`` uniform samples.
    Returns ``(found, method)``.
    """
    k = len(basis)
    if k == 0:
        return False, "exhaustive"
    if any(b.shape[0] != b.shape[1] for b in basis[0]):
        return False, "exhaustive"
    nblocks = len(basis[0])

    def ok(coefs):
        for j in range(nblocks):
            M = sum(int(c) * basis[i][j] for i, c in enumerate(coefs) if c) % p
            if M.shape[0] and linalg.rank_mod_p(M, p) < M.shape[0]:
                return False
        return True

    npoints = sum(p ** i for i in range(k))
    if npoints <= EXHAUSTIVE_LIMIT:
        for lead in range(k):
            for rest in np.ndindex(*([p] * (k - lead - 1))):
                coefs = [0] * lead + [1] + list(rest)
                if ok(coefs):
                    return True, "exhaustive"
        return False, "exhaustive"
    for _ in range(RANDOM_SAMPLES):
        if ok([rng.randrange(p) for _ in range(k)]):
            return True, "randomized"
    return False, "randomized"


def module_hom_space(L, Lp, p: int):
    """Basis (rows) of ``{S : S X = X' S, S Y = Y' S}`` as flattened ``n' x n`` matrices."""
    n, m = L.n, Lp.n
    I_n, I_m = np.eye(n, dtype=np.int64), np.eye(m, dtype=np.int64)
    rows = []
    for A, B in ((L.X, Lp.X), (L.Y, Lp.Y)):
        A, B = _to_int(A, p), _to_int(B, p)
        # row-major vec: vec(S A) = (I ⊗ A^T) vec S, vec(B S) = (B ⊗ I) vec S
        rows.append(np.kron(I_m, A.T) - np.kron(B, I_n))
    return linalg.nullspace_mod_p(np.vstack(rows) % p, p, n * m)


def module_iso(L: ModulePair, Lp: ModulePair, rng: Optional[random.Random] = None, field=None) -> bool:
    """``L ≅ L'`` by solving ``S X = X' S, S Y = Y' S`` and searching for an invertible ``S``."""
    if L.n != Lp.n:
        return False
    if L.n == 0:
        return True
    f = field or L.field
    rng = rng or random.Random(0)
    if isinstance(f, PrimeField):
        p = f.p
        K = module_hom_space(L, Lp, p)
        basis = [(row.reshape(L.n, L.n),) for row in K]
        return find_invertible(basis, p, rng)[0]
    # rationals: exact kernel, then random integer combinations
    n = L.n
    zero, one = f.zero, f.one
    eqs = []
    for A, B in ((L.X, Lp.X), (L.Y, Lp.Y)):
        for i in range(n):
            for j in range(n):
                row = [zero] * (n * n)
                for k in range(n):
                    row[i * n + k] += A[k][j]
                    row[k * n + j] -= B[i][k]
                eqs.append(row)
    K = linalg.nullspace(eqs, n * n, zero, one)
    if not K:
        return False
    for _ in range(max(50, RANDOM_SAMPLES)):
        coefs = [Fraction(rng.randint(-50, 50)) for _ in K]
        S = [[sum((c * v[i * n + j] for c, v in zip(coefs, K)), zero) for j in range(n)] for i in range(n)]
        if linalg.rank(S, zero, one) == n:
            return True
    return False


def random_module(n: int, field, rng: random.Random) -> ModulePair:
    p = field.p
    X = [[rng.randrange(p) for _ in range(n)] for _ in range(n)]
    Y = [[rng.randrange(p) for _ in range(n)] for _ in range(n)]
    return ModulePair(X, Y, field)


# --- bimodules --------------------------------------------------------------------------

@dataclass
class BimoduleSpec:
    """Free ``k<x,y>``-ranks per vertex of a wild shape and one block per solid arrow.

    Block entries are polynomials in ``x`` and ``y`` written in the relation
    DSL; ``blocks[arrow][i][j]`` maps copy ``j`` at the source to copy ``i`` at
    the target.  ``differential`` records how dashed arrows enter the morphism
    equations of a box (see ``representation_hom_space``).
    """

    shape: str
    box: BoxSpec
    ranks: Dict[str, int]
    blocks: Dict[str, list]
    note: str = ""
    differential: Dict[str, list] = field(default_factory=dict)

    def __post_init__(self):
        self.ranks = {str(k): int(v) for k, v in self.ranks.items()}
        if set(self.ranks) != set(self.box.vertices):
            raise ValueError(f"{self.shape}: ranks must cover exactly the vertices {self.box.vertices}")
        arrows = {n: (s, t) for n, s, t in self.box.solid}
        dashed = {n for n, _, _ in self.box.dashed}
        for name, M in self.blocks.items():
            if name in dashed:
                raise ValueError(f"{self.shape}: dashed arrow {name} cannot carry a block")
            if name not in arrows:
                raise ValueError(f"{self.shape}: unknown arrow {name}")
            s, t = arrows[name]
            if len(M) != self.ranks[t] or any(len(r) != self.ranks[s] for r in M):
                raise ValueError(f"{self.shape}: block {name} must be {self.ranks[t]}x{self.ranks[s]}")
        self._formal = {name: [[parse_formal(str(e)) if str(e).strip() not in ("", "0") else {} for e in row]
                               for row in M] for name, M in self.blocks.items()}

    def block(self, arrow: str):
        if arrow in self._formal:
            return self._formal[arrow]
        s, t = next((s, t) for n, s, t in self.box.solid if n == arrow)
        return [[{} for _ in range(self.ranks[s])] for _ in range(self.ranks[t])]

    def evaluate(self, arrow: str, L: ModulePair):
        """The block with ``x, y`` replaced by ``X, Y``: a matrix of size ``(r_t n) x (r_s n)``."""
        f, n = L.field, L.n
        B = self.block(arrow)
        rows, cols = len(B), (len(B[0]) if B else 0)
        out = [[f.zero] * (cols * n) for _ in range(rows * n)]
        for i in range(rows):
            for j in range(cols):
                M = _eval_poly(B[i][j], L)
                for a in range(n):
                    for b in range(n):
                        out[i * n + a][j * n + b] = M[a][b]
        return out

    def representation(self, L: ModulePair):
        """``M ⊗ L`` as a representation of the solid quiver: ``(dims, arrow matrices)``."""
        dims = {v: r * L.n for v, r in self.ranks.items()}
        return dims, {n: self.evaluate(n, L) for n, _, _ in self.box.solid}

    def opposite(self) -> "BimoduleSpec":
        """Transpose every block and reverse every arrow; words are reversed."""
        box = BoxSpec(self.box.vertices, tuple((n, t, s) for n, s, t in self.box.solid),
                      tuple((n, t, s) for n, s, t in self.box.dashed), self.box.name + "op")
        blocks = {}
        for name in self.blocks:
            B = self._formal[name]
            blocks[name] = [[_show_poly({tuple(reversed(w)): c for w, c in B[i][j].items()})
                             for i in range(len(B))] for j in range(len(B[0]) if B else 0)]
        # transposing a morphism equation reverses words and flips the sign of the right side
        diff = {a: [(-c, "*".join(reversed(w.split("*")))) for c, w in terms]
                for a, terms in self.differential.items()}
        return BimoduleSpec(self.shape + "op", box, dict(self.ranks), blocks, "opposite of " + self.shape, diff)

    def to_json(self) -> dict:
        out = {"shape": self.shape, "ranks": self.ranks, "blocks": self.blocks, "note": self.note}
        if self.differential:
            out["differential"] = {a: [[c, w] for c, w in t] for a, t in self.differential.items()}
        return out


def _eval_poly(formal, L: ModulePair):
    f, n = L.field, L.n
    out = [[f.zero] * n for _ in range(n)]
    for word, c in formal.items():
        M = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]
        for a in word:
            if a == "x":
                M = linalg.matmul(M, L.X, f.zero)
            elif a == "y":
                M = linalg.matmul(M, L.Y, f.zero)
            else:
                raise ValueError(f"bimodule entries are polynomials in x and y, got {a!r}")
        c = f(c)
        out = [[u + c * v for u, v in zip(ru, rv)] for ru, rv in zip(out, M)]
    return out


def _show_poly(formal) -> str:
    if not formal:
        return "0"
    parts = []
    for w, c in sorted(formal.items()):
        word = "*".join(w)
        if not w:
            parts.append(str(c))
        elif c == 1:
            parts.append(word)
        else:
            parts.append(f"{c}*{word}")
    return " + ".join(parts)


@lru_cache(maxsize=1)
def load_bimodules() -> Dict[str, BimoduleSpec]:
    with resources.files("dertype").joinpath("data/bimodules.json").open() as fh:
        raw = json.load(fh)
    out = {}
    for e in raw["bimodules"]:
        diff = {a: [(int(c), w) for c, w in t] for a, t in e.get("differential", {}).items()}
        out[e["shape"]] = BimoduleSpec(e["shape"], BOXES[e["shape"]], e["ranks"], e["blocks"], e.get("note", ""), diff)
    for k in list(out):
        out[k + "op"] = out[k].opposite()
    return out


def get_bimodule(shape: str) -> BimoduleSpec:
    try:
        return load_bimodules()[shape]
    except KeyError:
        raise KeyError(f"no bimodule data for shape {shape!r}") from None


# --- representation homs (solid arrows) ------------------------------------------

def representation_hom_space(box: BoxSpec, V, W, p: int, differential=None):
    """Basis of box morphisms ``V -> W`` over GF(p), as lists of per-vertex matrices.

    A morphism has a matrix ``f_v`` per vertex and ``f_phi`` per dashed arrow,
    subject to ``f_t V(a) - W(a) f_s = sum c * term`` for every solid ``a``.
    ``differential[a]`` lists the terms as ``(c, word)``; in the word ``"phi*p2"``
    the arrow ``p2`` acts first, giving ``f_phi V(p2)``, while ``"q1*phi"``
    gives ``W(q1) f_phi``.  Only the vertex components are returned.
    """
    differential = differential or {}
    dv, av = V
    dw, aw = W
    verts = list(box.vertices)
    offs, total = {}, 0
    for v in verts:
        offs[v] = total
        total += dw[v] * dv[v]
    doffs, dashed = {}, {n: (s, t) for n, s, t in box.dashed}
    for n, (s, t) in dashed.items():
        doffs[n] = total
        total += dw[t] * dv[s]
    solid = {n: (s, t) for n, s, t in box.solid}
    mat = lambda reps, dims, n: _to_int(reps[n], p).reshape(dims[solid[n][1]], dims[solid[n][0]])
    rows = []
    for name, s, t in box.solid:
        A, B = mat(av, dv, name), mat(aw, dw, name)
        # f_t A - B f_s - sum c*term = 0, entries (i, j) with i < dw[t], j < dv[s]
        block = np.zeros((dw[t] * dv[s], total), dtype=np.int64)
        for i in range(dw[t]):
            for j in range(dv[s]):
                r = i * dv[s] + j
                for k in range(dv[t]):
                    block[r, offs[t] + i * dv[t] + k] += A[k, j]
                for k in range(dw[s]):
                    block[r, offs[s] + k * dv[s] + j] -= B[i, k]
        for c, word in differential.get(name, ()):
            left, right = [w.strip() for w in word.split("*")]
            if right in dashed:
                # W(left) f_right, with f_right: V_s -> W_m
                m = dashed[right][1]
                Wl = mat(aw, dw, left)
                for i in range(dw[t]):
                    for j in range(dv[s]):
                        for k in range(dw[m]):
                            block[i * dv[s] + j, doffs[right] + k * dv[s] + j] -= c * Wl[i, k]
            else:
                # f_left V(right), with f_left: V_m -> W_t
                m = dashed[left][0]
                Vr = mat(av, dv, right)
                for i in range(dw[t]):
                    for j in range(dv[s]):
                        for k in range(dv[m]):
                            block[i * dv[s] + j, doffs[left] + i * dv[m] + k] -= c * Vr[k, j]
        rows.append(block % p)
    M = np.vstack(rows) if rows else np.zeros((0, total), dtype=np.int64)
    K = linalg.nullspace_mod_p(M, p, total) if total else np.zeros((0, 0), dtype=np.int64)
    out = []
    for vec in K:
        out.append(tuple(vec[offs[v]:offs[v] + dw[v] * dv[v]].reshape(dw[v], dv[v]) for v in verts))
    return out


def representation_iso(box: BoxSpec, V, W, p: int, rng, differential=None) -> bool:
    if V[0] != W[0]:
        return False
    basis = representation_hom_space(box, V, W, p, differential)
    blocks = [tuple(b for b in tup if b.size) for tup in basis]
    return find_invertible(blocks, p, rng)[0]


def representation_gate(B: BimoduleSpec, field=GATE_FIELD, count: int = 12, seed: int = 0) -> dict:
    """Check on random small modules that ``L -> M ⊗ L`` reflects isomorphism and keeps endomorphisms.

    For each sampled ``L`` the endomorphism dimension of ``M ⊗ L`` must equal
    that of ``L``; for each pair, isomorphism of the images must match
    isomorphism of the modules.
    """
    rng = random.Random(seed)
    p = field.p
    mods = _distinct_modules(count, field, rng)
    reps = [B.representation(L) for L in mods]
    failures = []
    for L, V in zip(mods, reps):
        e1 = len(module_hom_space(L, L, p))
        e2 = len(representation_hom_space(B.box, V, V, p, B.differential))
        if e1 != e2:
            failures.append({"kind": "endomorphisms", "module": L.to_json(), "dims": [e1, e2]})
    for i in range(len(mods)):
        for j in range(i + 1, len(mods)):
            if representation_iso(B.box, reps[i], reps[j], p, rng, B.differential):
                failures.append({"kind": "collision", "pair": [i, j]})
    return {"shape": B.shape, "ok": not failures, "modules": len(mods), "failures": failures, "seed": seed}


def _distinct_modules(count: int, field, rng: random.Random, max_dim: int = 2) -> List[ModulePair]:
    """Pairwise non-isomorphic random modules of dimension 1..max_dim (half of each, roughly)."""
    out: List[ModulePair] = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 100 * count:
            raise RuntimeError("could not sample enough non-isomorphic modules")
        n = 1 + (len(out) % max_dim)
        L = random_module(n, field, rng)
        if all(not module_iso(L, M, rng) for M in out):
            out.append(L)
    return out


# --- witness templates -----------------------------------------------------------

@dataclass
class WitnessTemplate:
    """A complex of projectives shaped like a wild box, with algebra labels on its arrows.

    ``nodes`` maps each box vertex to the projective it carries, written as a
    vertex name or as ``s(u)`` / ``t(u)`` for a parameter or arrow ``u``.
    ``labels`` maps each solid box arrow to an element in the relation DSL,
    whose atoms are parameters (bound through ``binding``) or arrows.
    """

    id: str
    shape: str
    nodes: Dict[str, str]
    labels: Dict[str, str]
    case_algebra: str
    binding: Dict[str, str] = field(default_factory=dict)
    params: Tuple[str, ...] = ()
    note: str = ""

    def __post_init__(self):
        self.params = tuple(self.params)
        box = self.box
        if set(self.nodes) != set(box.vertices):
            raise ValueError(f"{self.id}: nodes must be exactly the vertices of {self.shape}")
        solid = {n for n, _, _ in box.solid}
        if set(self.labels) != solid:
            raise ValueError(f"{self.id}: labels must cover exactly the solid arrows {sorted(solid)}")
        self.degrees = _grading(box)

    @property
    def box(self) -> BoxSpec:
        return get_bimodule(self.shape).box

    @property
    def edges(self) -> List[Tuple[str, str, str]]:
        return [(n, s, t) for n, s, t in self.box.solid]

    def presentation(self, field=QQ) -> Presentation:
        return parse_presentation(self.case_algebra, field)

    def to_json(self) -> dict:
        return {"id": self.id, "shape": self.shape, "params": list(self.params), "nodes": self.nodes,
                "labels": self.labels, "degrees": self.degrees, "case_algebra": self.case_algebra,
                "binding": self.binding, "note": self.note}


def _grading(box: BoxSpec) -> Dict[str, int]:
    """Degrees with every solid arrow lowering the degree by one; the lowest degree is 0."""
    adj: Dict[str, list] = {v: [] for v in box.vertices}
    for _, s, t in box.solid:
        adj[s].append((t, -1))
        adj[t].append((s, 1))
    deg: Dict[str, int] = {}
    for root in box.vertices:
        if root in deg:
            continue
        deg[root] = 0
        stack = [root]
        while stack:
            v = stack.pop()
            for w, step in adj[v]:
                if w not in deg:
                    deg[w] = deg[v] + step
                    stack.append(w)
                elif deg[w] != deg[v] + step:
                    raise ValueError(f"{box.name}: arrows cannot be graded consistently")
    low = min(deg.values())
    return {v: d - low for v, d in deg.items()}


@lru_cache(maxsize=1)
def load_templates() -> Dict[str, WitnessTemplate]:
    with resources.files("dertype").joinpath("data/templates.json").open() as fh:
        raw = json.load(fh)
    out = {}
    for e in raw["templates"]:
        out[e["id"]] = WitnessTemplate(e["id"], e["shape"], e["nodes"], e["labels"], e["case_algebra"],
                                       e.get("binding", {}), tuple(e.get("params", ())), e.get("note", ""))
    return out


def get_template(template_id: str) -> WitnessTemplate:
    try:
        return load_templates()[template_id]
    except KeyError:
        raise KeyError(f"no witness template {template_id!r}") from None


class _Resolved:
    """Labels and node vertices of a template over a concrete algebra."""

    def __init__(self, T: WitnessTemplate, alg: TruncatedAlgebra, binding=None):
        self.alg = alg
        binding = dict(T.binding if binding is None else binding)
        q = alg.quiver
        f = alg.field

        def arrow(name):
            if not q.has_arrow(name):
                raise PresentationError(f"{T.id}: {name!r} is neither a parameter nor an arrow")
            a = q.arrow(name)
            return AlgebraElement(a.source, a.target, {(name,): f.one})

        def raw_mul(x, y):
            if x.source != y.target:
                raise PresentationError(f"{T.id}: {x.to_dsl()} and {y.to_dsl()} do not compose")
            return x.concat(y)

        self.params = {}
        for name, text in binding.items():
            self.params[name] = evaluate_formal(parse_formal(text), arrow, raw_mul, f)

        def atom(name):
            return self.params[name] if name in self.params else arrow(name)

        self.labels = {e: evaluate_formal(parse_formal(text), atom, raw_mul, f) for e, text in T.labels.items()}
        self.vertex = {}
        for node, expr in T.nodes.items():
            expr = expr.strip()
            if expr[:2] in ("s(", "t(") and expr.endswith(")"):
                x = atom(expr[2:-1].strip())
                self.vertex[node] = x.source if expr[0] == "s" else x.target
            else:
                self.vertex[node] = expr
            if self.vertex[node] not in q.vertices:
                raise PresentationError(f"{T.id}: node {node} lands on unknown vertex {self.vertex[node]!r}")


@dataclass
class WitnessReport:
    template: str
    ok: bool
    composites: List[dict]
    failures: List[dict]
    warnings: List[str]
    truncation: int

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"template": self.template, "ok": self.ok, "composites": self.composites,
                "failures": self.failures, "warnings": self.warnings, "truncation": self.truncation}


def _needed_degree(T: WitnessTemplate, res_labels) -> int:
    top = 2
    for n1, _, t1 in T.edges:
        for n2, s2, _ in T.edges:
            if s2 == t1:
                a, b = res_labels[n1].max_degree, res_labels[n2].max_degree
                top = max(top, (a or 0) + (b or 0))
    return top


def verify_zero_composition(T: WitnessTemplate, alg=None, binding=None) -> WitnessReport:
    """Certify that every two-step composite in ``T`` vanishes in the algebra.

    ``alg`` may be a ``TruncatedAlgebra``, a ``Presentation`` or ``None`` (the
    template's own case algebra).  A composite whose degree exceeds the
    truncation cannot be certified and counts as a failure.
    """
    if alg is None:
        alg = T.presentation()
    if isinstance(alg, Presentation):
        probe = _Resolved(T, TruncatedAlgebra(alg, 2), binding)
        alg = TruncatedAlgebra(alg, _needed_degree(T, probe.labels) + 2)
    failures, warnings, composites = [], [], []
    try:
        res = _Resolved(T, alg, binding)
    except PresentationError as exc:
        return WitnessReport(T.id, False, [], [{"kind": "parse", "detail": str(exc)}], [], alg.N)
    for name, s, t in T.edges:
        x = res.labels[name]
        want = (res.vertex[t], res.vertex[s])
        if (x.source, x.target) != want:
            failures.append({"kind": "endpoint", "arrow": name, "label": T.labels[name],
                             "detail": f"label runs {x.source}->{x.target}, needs {want[0]}->{want[1]}"})
        elif alg.is_zero(x):
            warnings.append(f"label of {name} ({T.labels[name]}) vanishes in the algebra")
        if () in x.terms:
            failures.append({"kind": "radical", "arrow": name, "label": T.labels[name]})
    if failures:
        return WitnessReport(T.id, False, composites, failures, warnings, alg.N)
    for n1, _, t1 in T.edges:
        for n2, s2, _ in T.edges:
            if s2 != t1:
                continue
            x, y = res.labels[n1], res.labels[n2]
            product = x.concat(y)
            entry = {"path": [n1, n2], "product": f"({T.labels[n1]})*({T.labels[n2]})"}
            if product.max_degree is not None and product.max_degree > alg.N:
                entry["normal_form"] = None
                composites.append(entry)
                failures.append({"kind": "beyond_truncation", "path": [n1, n2], "truncation": alg.N})
                continue
            nf = alg.normal_form(product)
            entry["normal_form"] = nf.to_dsl() if nf else "0"
            composites.append(entry)
            if nf:
                failures.append({"kind": "nonzero_composite", "path": [n1, n2],
                                 "labels": [T.labels[n1], T.labels[n2]], "value": nf.to_dsl()})
    return WitnessReport(T.id, not failures, composites, failures, warnings, alg.N)


def instantiate_witness(T: WitnessTemplate, B: BimoduleSpec, L: ModulePair, alg: TruncatedAlgebra,
                        binding=None) -> ProjectiveComplex:
    """The complex ``N ⊗ L``: node ``i`` becomes ``rank_i · n`` copies of its projective.

    Within a degree, summands are ordered by vertex, then node, then copy.
    """
    if B.shape != T.shape:
        raise ValueError(f"bimodule {B.shape} does not fit template shape {T.shape}")
    if L.field != alg.field:
        raise ValueError("module and algebra must live over the same field")
    res = _Resolved(T, alg, binding)
    verts = list(alg.quiver.vertices)
    n = L.n
    slots: Dict[int, list] = {}
    for node in T.nodes:
        for c in range(B.ranks[node] * n):
            slots.setdefault(T.degrees[node], []).append((verts.index(res.vertex[node]), list(T.nodes).index(node), node, c))
    pos, ranks = {}, {}
    for d, items in slots.items():
        items.sort()
        for i, (_, _, node, c) in enumerate(items):
            pos[(node, c)] = i
        ranks[d] = tuple(sum(1 for it in items if it[0] == k) for k in range(len(verts)))
    diffs: Dict[int, list] = {}
    for d in ranks:
        if d - 1 in ranks:
            diffs[d] = [[None] * len(slots[d]) for _ in slots[d - 1]]
    for name, s, t in T.edges:
        M = B.evaluate(name, L)
        x = res.labels[name]
        D = diffs[T.degrees[s]]
        for i, row in enumerate(M):
            for j, c in enumerate(row):
                if not c:
                    continue
                r, k = pos[(t, i)], pos[(s, j)]
                D[r][k] = x.scale(c) if D[r][k] is None else D[r][k] + x.scale(c)
    return ProjectiveComplex(tuple(verts), ranks, diffs)


# --- complexes as matrices over a prime field ----------------------------------------

class _LinearModel:
    """Right-multiplication matrices of a finite truncated algebra over GF(p)."""

    def __init__(self, alg: TruncatedAlgebra):
        self.alg = alg
        self.p = alg.field.p
        verts = alg.quiver.vertices
        self.basis = {v: [(t, k) for t in verts for k in alg.basis(v, t)] for v in verts}
        self.index = {v: {b: i for i, b in enumerate(bs)} for v, bs in self.basis.items()}
        self._cache = {}

    def right(self, source, target, key):
        """Matrix of ``u -> u·w`` from ``A e_target`` to ``A e_source`` for the path ``w = key``."""
        ck = (source, target, key)
        if ck not in self._cache:
            one = self.alg.field.one
            w = AlgebraElement(source, target, {key: one})
            M = np.zeros((len(self.basis[source]), len(self.basis[target])), dtype=np.int64)
            for j, (t, k) in enumerate(self.basis[target]):
                img = self.alg.multiply(AlgebraElement(target, t, {k: one}), w)
                for kk, c in img.terms.items():
                    M[self.index[source][(t, kk)], j] = int(c)
            self._cache[ck] = M
        return self._cache[ck]

    def element(self, x: AlgebraElement):
        M = np.zeros((len(self.basis[x.source]), len(self.basis[x.target])), dtype=np.int64)
        for k, c in self.alg.normal_form(x, strict=False).terms.items():
            M = M + int(c) * self.right(x.source, x.target, k)
        return M % self.p

    def offsets(self, summands):
        out, total = [], 0
        for v in summands:
            out.append(total)
            total += len(self.basis[v])
        return out, total

    def differential(self, C: ProjectiveComplex, n: int):
        rows, cols = C.summand_vertices(n - 1), C.summand_vertices(n)
        ro, rt = self.offsets(rows)
        co, ct = self.offsets(cols)
        M = np.zeros((rt, ct), dtype=np.int64)
        if rows and cols:
            for r, row in enumerate(C.differential(n)):
                for c, x in enumerate(row):
                    if x:
                        blk = self.element(x)
                        M[ro[r]:ro[r] + blk.shape[0], co[c]:co[c] + blk.shape[1]] = blk
        return M


def homology_dims_mod_p(C: ProjectiveComplex, model: _LinearModel) -> Dict[int, int]:
    p = model.p
    rk = {}
    for n in set(C.degrees) | {d + 1 for d in C.degrees}:
        if n in C.ranks and n - 1 in C.ranks:
            rk[n] = linalg.rank_mod_p(model.differential(C, n), p)
    dims = {n: model.offsets(C.summand_vertices(n))[1] for n in C.degrees}
    return {n: dims[n] - rk.get(n, 0) - rk.get(n + 1, 0) for n in C.degrees}


def chain_map_tops(C: ProjectiveComplex, D: ProjectiveComplex, model: _LinearModel):
    """Basis of the top parts of chain maps ``C -> D``, one matrix per degree and vertex.

    A chain map between minimal complexes of projectives is invertible exactly
    when these tops are, so isomorphism reduces to ``find_invertible``.
    """
    p = model.p
    degs = sorted(set(C.ranks) | set(D.ranks))
    src = {n: C.summand_vertices(n) for n in degs}
    tgt = {n: D.summand_vertices(n) for n in degs}
    off_s = {n: model.offsets(src[n]) for n in degs}
    off_t = {n: model.offsets(tgt[n]) for n in degs}
    dC = {n: model.differential(C, n) for n in degs}
    dD = {n: model.differential(D, n) for n in degs}
    # constraint blocks: D_n F_n - F_{n-1} C_n, a map P_n -> Q_{n-1}
    cons, ncons = {}, 0
    for n in degs:
        rows, cols = off_t.get(n - 1, ([], 0))[1], off_s[n][1]
        if rows and cols:
            cons[n] = (ncons, rows, cols)
            ncons += rows * cols
    unknowns = []
    for n in degs:
        for r, vr in enumerate(tgt[n]):
            for c, vc in enumerate(src[n]):
                for k in model.alg.basis(vr, vc):
                    unknowns.append((n, r, c, k))
    if not unknowns:
        return [], degs
    A = np.zeros((ncons, len(unknowns)), dtype=np.int64)
    for j, (n, r, c, k) in enumerate(unknowns):
        E = model.right(tgt[n][r], src[n][c], k)
        r0, c0 = off_t[n][0][r], off_s[n][0][c]
        if n in cons:
            base, rows, cols = cons[n]
            blk = np.zeros((rows, cols), dtype=np.int64)
            blk[:, c0:c0 + E.shape[1]] = dD[n][:, r0:r0 + E.shape[0]] @ E
            A[base:base + rows * cols, j] += blk.reshape(-1)
        if n + 1 in cons:
            base, rows, cols = cons[n + 1]
            blk = np.zeros((rows, cols), dtype=np.int64)
            blk[r0:r0 + E.shape[0], :] = -(E @ dC[n + 1][c0:c0 + E.shape[1], :])
            A[base:base + rows * cols, j] += blk.reshape(-1)
    K = linalg.nullspace_mod_p(A % p, p, len(unknowns))
    # top coordinates: trivial-path coefficients between equal vertices
    top_index = {}
    for j, (n, r, c, k) in enumerate(unknowns):
        if k == ():
            top_index[j] = (n, r, c)
    if not len(K):
        return [], degs
    cols = sorted(top_index)
    T = K[:, cols] % p
    R, piv = linalg.rref_mod_p(T, p)
    basis = []
    for vec in R[:len(piv)]:
        mats = []
        for n in degs:
            for v in model.alg.quiver.vertices:
                rs = [i for i, x in enumerate(tgt[n]) if x == v]
                cs = [i for i, x in enumerate(src[n]) if x == v]
                mats.append(np.zeros((len(rs), len(cs)), dtype=np.int64))
        basis.append(mats)
    layout = []
    for n in degs:
        for v in model.alg.quiver.vertices:
            rs = {i: a for a, i in enumerate(i for i, x in enumerate(tgt[n]) if x == v)}
            cs = {i: a for a, i in enumerate(i for i, x in enumerate(src[n]) if x == v)}
            layout.append((n, rs, cs))
    for b, vec in enumerate(R[:len(piv)]):
        for pos, j in enumerate(cols):
            if not vec[pos]:
                continue
            n, r, c = top_index[j]
            for slot, (m, rs, cs) in enumerate(layout):
                if m == n and r in rs and c in cs:
                    basis[b][slot][rs[r], cs[c]] = vec[pos]
    return [tuple(mats) for mats in basis], degs


def complex_iso(C: ProjectiveComplex, D: ProjectiveComplex, model: _LinearModel,
                rng: Optional[random.Random] = None):
    """Decide ``C ≅ D`` for minimal complexes at gate sizes; returns ``(iso, method)``."""
    if vector_rank(C) != vector_rank(D):
        return False, "invariant"
    basis, _ = chain_map_tops(C, D, model)
    blocks = [tuple(b for b in tup if b.size) for tup in basis]
    return find_invertible(blocks, model.p, rng or random.Random(0))


def strict_wildness_gate(T: WitnessTemplate, B: Optional[BimoduleSpec] = None, alg=None, field=GATE_FIELD,
                         count: int = 20, seed: int = 0, max_dim: int = 2, binding=None) -> dict:
    """Empirical check that ``L -> N ⊗ L`` separates non-isomorphic small modules.

    Pairs are first compared by vector rank and homology dimensions; ties go
    to a chain-isomorphism search.  The report also checks that ``L ≅ S L S^-1``
    gives isomorphic complexes and that a direct sum of modules gives the
    direct sum of complexes.
    """
    import time

    start = time.perf_counter()
    B = B or get_bimodule(T.shape)
    if alg is None or isinstance(alg, Presentation):
        pres = T.presentation(field) if alg is None else alg
        probe = _Resolved(T, TruncatedAlgebra(pres, 2, field), binding)
        alg = TruncatedAlgebra(pres, _needed_degree(T, probe.labels) + 2, field)
    cert = verify_zero_composition(T, alg, binding)
    report = {"template": T.id, "shape": B.shape, "seed": seed, "modules": count, "field": field.p,
              "certificate": cert.ok}
    if not cert.ok:
        report.update(ok=False, failures=[{"kind": "certificate", "detail": cert.failures}])
        return report
    rng = random.Random(seed)
    model = _LinearModel(alg)
    mods = _distinct_modules(count, field, rng, max_dim)
    cxs = [instantiate_witness(T, B, L, alg, binding) for L in mods]
    inv = [(vector_rank(C), tuple(sorted(homology_dims_mod_p(C, model).items()))) for C in cxs]
    failures, methods = [], set()
    by_invariant = by_search = 0
    for i in range(len(mods)):
        for j in range(i + 1, len(mods)):
            if inv[i] != inv[j]:
                by_invariant += 1
                continue
            iso, method = complex_iso(cxs[i], cxs[j], model, rng)
            methods.add(method)
            by_search += 1
            if iso:
                failures.append({"kind": "collision", "pair": [i, j],
                                 "modules": [mods[i].to_json(), mods[j].to_json()]})
    # sanity direction: a conjugate module must give an isomorphic complex
    S = [[1, 2], [3, 5]] if mods[-1].n == 2 else [[7]]
    twin = instantiate_witness(T, B, mods[-1].conjugate(S), alg, binding)
    same, method = complex_iso(cxs[-1], twin, model, rng)
    methods.add(method)
    if not same:
        failures.append({"kind": "conjugate_not_isomorphic", "module": mods[-1].to_json()})
    # additivity: L1 ⊕ L2 gives the direct sum of the two complexes
    summed = instantiate_witness(T, B, mods[0].direct_sum(mods[1]), alg, binding)
    split, method = complex_iso(summed, cxs[0].direct_sum(cxs[1]), model, rng)
    methods.add(method)
    if not split:
        failures.append({"kind": "direct_sum_not_detected", "pair": [0, 1]})
    report.update(ok=not failures, pairs=count * (count - 1) // 2, by_invariant=by_invariant,
                  by_search=by_search, collisions=sum(f["kind"] == "collision" for f in failures),
                  failures=failures, methods=sorted(methods - {"invariant"}), truncation=alg.N,
                  seconds=round(time.perf_counter() - start, 2))
    return report
