"""Integer homology of finite chain complexes via Smith normal form.

All arithmetic is on Python ints.  ``smith_normal_form`` is the dense
algorithm that also returns the unimodular transforms; ``invariant_factors``
first strips unit pivots with sparse elimination (cheap on boundary
matrices of meshes, whose entries are mostly +-1) and finishes the small
residual densely.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sps

from .errors import NotAComplex


def _to_rows(A) -> Tuple[Tuple[int, int], List[List[int]]]:
    if sps.issparse(A):
        A = A.toarray()
    arr = np.asarray(A, dtype=object)
    if arr.ndim != 2:
        arr = arr.reshape(len(arr), -1) if arr.size else arr.reshape(0, 0)
    return arr.shape, [[int(v) for v in row] for row in arr.tolist()]


def _eye(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class SNFResult:
    S: np.ndarray
    U: np.ndarray
    V: np.ndarray

    @property
    def diagonal(self) -> Tuple[int, ...]:
        k = min(self.S.shape)
        return tuple(int(self.S[i, i]) for i in range(k))

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        return tuple(d for d in self.diagonal if d != 0)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def smith_normal_form(A) -> SNFResult:
    """``U @ A @ V == S`` with ``U``, ``V`` unimodular and ``S`` in Smith form.

    Pivot rule: smallest nonzero absolute value in the trailing block,
    ties broken by row-major position.  Returned matrices have object
    dtype holding Python ints.
    """
    (m, n), A = _to_rows(A)
    if m == 0 or n == 0:
        return SNFResult(np.zeros((m, n), dtype=object),
                         np.array(_eye(m), dtype=object).reshape(m, m),
                         np.array(_eye(n), dtype=object).reshape(n, n))
    U, V = _eye(m), _eye(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (A, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        if q:
            A[dst] = [a - q * b for a, b in zip(A[dst], A[src])]
            U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        if q:
            for M in (A, V):
                for row in M:
                    row[dst] -= q * row[src]

    def smallest(t, cross_only=False):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                if cross_only and i != t and j != t:
                    continue
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        return best

    for t in range(min(m, n)):
        piv = smallest(t)
        if piv is None:
            break
        _, i, j = piv
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // p)
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // p)
                    clean = clean and A[t][j] == 0
            if not clean:
                _, i, j = smallest(t, cross_only=True)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(A[i][j] % p for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, -1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]

    return SNFResult(np.array(A, dtype=object), np.array(U, dtype=object),
                     np.array(V, dtype=object))


def _sparse_unit_reduction(A):
    """Eliminate +-1 pivots; return (count, residual rows as dict-of-dicts)."""
    A = sps.coo_matrix(A)
    rows, cols = {}, {}
    for i, j, v in zip(A.row.tolist(), A.col.tolist(), A.data.tolist()):
        if v:
            rows.setdefault(i, {})[j] = rows.get(i, {}).get(j, 0) + int(v)
            cols.setdefault(j, set()).add(i)
    units = 0
    progress = True
    while progress:
        progress = False
        for c in sorted(cols, key=lambda c: len(cols[c])):
            col = cols.get(c)
            if not col:
                continue
            cand = [r for r in col if abs(rows[r][c]) == 1]
            if not cand:
                continue
            r = min(cand, key=lambda r: (len(rows[r]), r))
            pivot_row = rows.pop(r)
            v = pivot_row[c]
            for i in list(col):
                if i == r:
                    continue
                row = rows[i]
                factor = row[c] * v
                for j, a in pivot_row.items():
                    new = row.get(j, 0) - factor * a
                    if new:
                        if j not in row:
                            cols[j].add(i)
                        row[j] = new
                    elif j in row:
                        del row[j]
                        cols[j].discard(i)
            for j in pivot_row:
                cols[j].discard(r)
            del cols[c]
            units += 1
            progress = True
    return units, rows


def invariant_factors(A) -> Tuple[int, ...]:
    """Nonzero invariant factors of an integer matrix (dense or sparse)."""
    if min(np.shape(A)) == 0:
        return ()
    units, rows = _sparse_unit_reduction(A)
    rows = {i: r for i, r in rows.items() if r}
    if not rows:
        return (1,) * units
    col_ids = sorted({j for r in rows.values() for j in r})
    col_pos = {j: k for k, j in enumerate(col_ids)}
    dense = [[0] * len(col_ids) for _ in rows]
    for k, r in enumerate(rows.values()):
        for j, v in r.items():
            dense[k][col_pos[j]] = v
    rest = smith_normal_form(dense).invariant_factors
    return (1,) * units + rest


@dataclass(frozen=True)
class HomologyGroup:
    betti: int
    torsion: Tuple[int, ...] = ()

    def __str__(self):
        parts = []
        if self.betti:
            parts.append("Z" if self.betti == 1 else f"Z^{self.betti}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class HomologyProfile:
    groups: Tuple[HomologyGroup, ...]

    @property
    def betti(self) -> Tuple[int, ...]:
        return tuple(g.betti for g in self.groups)

    @property
    def torsion(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(g.torsion for g in self.groups)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * g.betti for k, g in enumerate(self.groups))

    def padded(self, n):
        extra = (HomologyGroup(0),) * max(0, n - len(self.groups))
        return self.groups + extra

    def __eq__(self, other):
        if not isinstance(other, HomologyProfile):
            return NotImplemented
        n = max(len(self.groups), len(other.groups))
        return self.padded(n) == other.padded(n)

    def __hash__(self):
        groups = list(self.groups)
        while groups and groups[-1] == HomologyGroup(0):
            groups.pop()
        return hash(tuple(groups))

    def __str__(self):
        return ", ".join(f"H{k}={g}" for k, g in enumerate(self.groups))

    def as_dict(self):
        return [{"degree": k, "betti": g.betti, "torsion": list(g.torsion)}
                for k, g in enumerate(self.groups)]

    @classmethod
    def from_betti(cls, betti, torsion=None):
        torsion = torsion or {}
        return cls(tuple(HomologyGroup(b, tuple(torsion.get(k, ()))) for k, b in enumerate(betti)))


def _as_sparse(B, shape):
    if B is None:
        return sps.csr_matrix(shape, dtype=np.int64)
    M = sps.csr_matrix(B, dtype=np.int64) if not sps.issparse(B) else B.tocsr().astype(np.int64)
    if np.prod(np.shape(B)) == 0:
        M = sps.csr_matrix(shape, dtype=np.int64)
    if M.shape != shape:
        raise ValueError(f"boundary has shape {M.shape}, expected {shape}")
    return M


def normalize_boundaries(ranks: Sequence[int], boundaries: Sequence) -> List[sps.csr_matrix]:
    """``out[k]`` is ``d_k : C_k -> C_{k-1}`` as a sparse matrix of the right shape."""
    out = []
    for k, r in enumerate(ranks):
        rows = ranks[k - 1] if k > 0 else 0
        B = boundaries[k] if k < len(boundaries) else None
        out.append(_as_sparse(B, (rows, r)))
    return out


def first_nonzero_composition(ranks, boundaries) -> Optional[int]:
    """Smallest ``k`` with ``d_{k-1} d_k != 0``, or None."""
    bs = normalize_boundaries(ranks, boundaries)
    for k in range(1, len(bs)):
        prod = bs[k - 1] @ bs[k]
        if prod.nnz and np.any(prod.data != 0):
            return k
    return None


def homology_of_complex(ranks: Sequence[int], boundaries: Sequence) -> HomologyProfile:
    """``H_k = ker d_k / im d_{k+1}`` for ``k = 0 .. len(ranks)-1``."""
    ranks = [int(r) for r in ranks]
    bad = first_nonzero_composition(ranks, boundaries)
    if bad is not None:
        raise NotAComplex(bad)
    bs = normalize_boundaries(ranks, boundaries)
    factors = [invariant_factors(B) if B.nnz else () for B in bs]
    groups = []
    for k, r in enumerate(ranks):
        rank_k = len(factors[k])
        above = factors[k + 1] if k + 1 < len(factors) else ()
        betti = r - rank_k - len(above)
        torsion = tuple(sorted(d for d in above if d > 1))
        groups.append(HomologyGroup(betti, torsion))
    return HomologyProfile(tuple(groups))
