"""Exact linear algebra over QQ and GF(p).

Dense helpers take lists of lists whose entries are field elements
(``Fraction`` or :class:`~dertype.fields.GFElement`).  The ``*_mod_p``
variants work on integer numpy arrays and are used for the randomized
searches, where speed matters more than generality.
"""

from __future__ import annotations

from typing import Callable, Dict, Hashable, List, Optional

import numpy as np


class SparseEchelon:
    """Incrementally maintained, fully reduced row echelon form of sparse vectors.

    Vectors are dicts ``key -> coefficient``.  The pivot of a row is its largest
    key under ``order``; every stored row is monic and contains no other pivot.
    """

    def __init__(self, order: Callable = lambda k: k, budget: Optional[int] = None):
        self.order = order
        self.rows: Dict[Hashable, dict] = {}
        self._occurs: Dict[Hashable, set] = {}
        self.budget = budget

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        out = dict(vec)
        for k in [k for k in vec if k in self.rows]:
            c = out.pop(k, 0)
            if not c:
                continue
            for kk, v in self.rows[k].items():
                if kk == k:
                    continue
                nv = out.get(kk, 0) - c * v
                if nv:
                    out[kk] = nv
                else:
                    out.pop(kk, None)
        return out

    def insert(self, vec: dict) -> Optional[dict]:
        """Add ``vec`` to the span; return the new monic row or ``None`` if dependent."""
        r = self.reduce(vec)
        if not r:
            return None
        piv = max(r, key=self.order)
        inv = 1 / r[piv]
        r = {k: v * inv for k, v in r.items()}
        # clear the new pivot from older rows
        for other in list(self._occurs.get(piv, ())):
            row = self.rows[other]
            c = row.get(piv)
            if not c:
                continue
            for kk, v in r.items():
                nv = row.get(kk, 0) - c * v
                if nv:
                    if kk not in row:
                        self._occurs.setdefault(kk, set()).add(other)
                    row[kk] = nv
                else:
                    row.pop(kk, None)
                    self._occurs.get(kk, set()).discard(other)
        self.rows[piv] = r
        for kk in r:
            if kk != piv:
                self._occurs.setdefault(kk, set()).add(piv)
        if self.budget is not None and len(self.rows) > self.budget:
            raise BudgetExceeded(f"more than {self.budget} rewriting rules")
        return r


class BudgetExceeded(RuntimeError):
    pass


def _zero_like(x):
    return x - x


def rref(M: List[list], zero, one):
    """Reduced row echelon form; returns ``(R, pivot_columns)``."""
    R = [list(r) for r in M]
    if not R:
        return R, []
    ncols = len(R[0])
    pivots = []
    row = 0
    for col in range(ncols):
        sel = next((i for i in range(row, len(R)) if R[i][col]), None)
        if sel is None:
            continue
        R[row], R[sel] = R[sel], R[row]
        inv = one / R[row][col]
        R[row] = [v * inv for v in R[row]]
        for i in range(len(R)):
            if i != row and R[i][col]:
                c = R[i][col]
                R[i] = [a - c * b for a, b in zip(R[i], R[row])]
        pivots.append(col)
        row += 1
        if row == len(R):
            break
    return R, pivots


def rank(M: List[list], zero, one) -> int:
    return len(rref(M, zero, one)[1])


def nullspace(M: List[list], ncols: int, zero, one) -> List[list]:
    """Basis of ``{v : M v = 0}`` as a list of column vectors."""
    if not M:
        return [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
    R, piv = rref(M, zero, one)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, pc in enumerate(piv):
            v[pc] = -R[i][f]
        basis.append(v)
    return basis


def solve(A: List[list], b: list, zero, one) -> Optional[list]:
    """One solution of ``A x = b`` or ``None``."""
    ncols = len(A[0]) if A else 0
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    R, piv = rref(aug, zero, one)
    if ncols in piv:
        return None
    x = [zero] * ncols
    for i, pc in enumerate(piv):
        x[pc] = R[i][ncols]
    return x


def matmul(A, B, zero):
    if not A or not B:
        return [[zero] * (len(B[0]) if B else 0) for _ in A]
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), zero) for j in range(len(B[0]))] for i in range(len(A))]


# --- numpy mod p ---------------------------------------------------------


def rref_mod_p(M, p: int):
    R = np.array(M, dtype=np.int64) % p
    if R.size == 0:
        return R, []
    # zero rows carry no information and dominate tall sparse systems
    R = R[np.any(R, axis=1)]
    nrows, ncols = R.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        nz = np.nonzero(R[row:, col])[0]
        if nz.size == 0:
            continue
        sel = row + nz[0]
        if sel != row:
            R[[row, sel]] = R[[sel, row]]
        R[row] = R[row] * pow(int(R[row, col]), -1, p) % p
        hit = np.nonzero(R[:, col])[0]
        hit = hit[hit != row]
        if hit.size:
            R[hit] = (R[hit] - np.outer(R[hit, col], R[row])) % p
        pivots.append(col)
        row += 1
    return R, pivots


def rank_mod_p(M, p: int) -> int:
    return len(rref_mod_p(M, p)[1])


def nullspace_mod_p(M, p: int, ncols: Optional[int] = None) -> np.ndarray:
    """Rows of the returned array span the right kernel of ``M`` over GF(p)."""
    M = np.array(M, dtype=np.int64)
    if ncols is None:
        ncols = M.shape[1]
    if M.size == 0:
        return np.eye(ncols, dtype=np.int64)
    R, piv = rref_mod_p(M, p)
    free = [c for c in range(ncols) if c not in piv]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for j, f in enumerate(free):
        out[j, f] = 1
        for i, pc in enumerate(piv):
            out[j, pc] = (-R[i, f]) % p
    return out


def det_nonzero_mod_p(M, p: int) -> bool:
    M = np.asarray(M)
    return M.shape[0] == M.shape[1] and rank_mod_p(M, p) == M.shape[0]
