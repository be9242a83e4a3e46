"""Simplicial homology of triangulated surfaces and sublevel-set filtrations.

Simplices are strictly increasing vertex tuples; the boundary of
``(v0, ..., vk)`` is ``sum (-1)^i (v0, .., ^vi, .., vk)``.  Sublevel sets are
full subcomplexes on the vertices with value at most a threshold.
"""

import itertools
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sps

from .errors import NonManifoldWarning, ParseError, ThresholdOnCriticalValue
from .homology import HomologyProfile, homology_of_complex

Simplex = Tuple[int, ...]


@dataclass(frozen=True)
class SimplicialComplex:
    """``simplices[k]`` is the sorted tuple of k-simplices."""

    simplices: Tuple[Tuple[Simplex, ...], ...]
    positions: Optional[np.ndarray] = None
    vertex_values: Optional[np.ndarray] = None

    @classmethod
    def from_triangles(cls, triangles, n_vertices=None, positions=None, values=None):
        tris = sorted({tuple(sorted(int(v) for v in t)) for t in triangles})
        for t in tris:
            if len(set(t)) != 3:
                raise ValueError(f"degenerate triangle {t}")
        edges = sorted({e for t in tris for e in itertools.combinations(t, 2)})
        if n_vertices is None:
            n_vertices = 1 + max((v for t in tris for v in t), default=-1)
        verts = tuple((v,) for v in range(n_vertices))
        pos = None if positions is None else np.asarray(positions, dtype=float)
        vals = None if values is None else np.asarray(values, dtype=float)
        if vals is not None and len(vals) != n_vertices:
            raise ValueError(f"{len(vals)} values for {n_vertices} vertices")
        return cls((verts, tuple(edges), tuple(tris)), pos, vals)

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    @property
    def f_vector(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector))

    def with_values(self, values):
        values = np.asarray(values, dtype=float)
        if len(values) != self.f_vector[0]:
            raise ValueError(f"{len(values)} values for {self.f_vector[0]} vertices")
        return SimplicialComplex(self.simplices, self.positions, values)

    def boundary_matrix(self, k: int) -> sps.csr_matrix:
        """``d_k`` as a sparse int matrix, correctly shaped for any ``k``."""
        if k <= 0 or k > self.dim:
            rows = len(self.simplices[k - 1]) if 0 < k <= self.dim + 1 else 0
            cols = len(self.simplices[k]) if 0 <= k <= self.dim else 0
            return sps.csr_matrix((rows, cols), dtype=np.int64)
        return _boundary(self.simplices[k - 1], self.simplices[k])

    def is_manifold_surface(self) -> bool:
        return not _bad_edges(self.simplices[2]) if self.dim == 2 else False


def _boundary(lower, upper) -> sps.csr_matrix:
    index = {s: i for i, s in enumerate(lower)}
    rows, cols, data = [], [], []
    for j, s in enumerate(upper):
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            rows.append(index[face])
            cols.append(j)
            data.append(-1 if i % 2 else 1)
    return sps.csr_matrix((data, (rows, cols)), shape=(len(lower), len(upper)), dtype=np.int64)


def _bad_edges(triangles):
    count = Counter(e for t in triangles for e in itertools.combinations(t, 2))
    return sorted(e for e, n in count.items() if n != 2)


def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def load_mesh(source: str, values=None) -> SimplicialComplex:
    """Parse ASCII OFF text (``OFF``, counts, vertices, ``3 i j k`` faces).

    ``values`` is an optional per-vertex sequence.  Edges are induced from
    the triangles; a ``NonManifoldWarning`` is issued when an edge does not
    border exactly two triangles.
    """
    lines = _data_lines(source)
    last = 0

    def nxt(what):
        nonlocal last
        try:
            last, toks = next(lines)
        except StopIteration:
            raise ParseError(f"unexpected end of file while reading {what}", last + 1)
        return toks

    head = nxt("header")
    if head[0] != "OFF":
        raise ParseError(f"expected 'OFF' header, found {head[0]!r}", last)
    counts = head[1:] if len(head) > 1 else nxt("counts")
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise ParseError("counts line must be 'nv nf ne'", last)
    if nv < 0 or nf < 0:
        raise ParseError("negative element count", last)
    pos = np.empty((nv, 3))
    for i in range(nv):
        toks = nxt(f"vertex {i}")
        try:
            pos[i] = [float(t) for t in toks[:3]]
        except ValueError:
            raise ParseError(f"vertex {i} has non-numeric coordinates", last)
        if len(toks) < 3:
            raise ParseError(f"vertex {i} needs 3 coordinates", last)
    tris = []
    for f in range(nf):
        toks = nxt(f"face {f}")
        try:
            ints = [int(t) for t in toks]
        except ValueError:
            raise ParseError(f"face {f} has non-integer entries", last)
        if ints[0] != 3 or len(ints) < 4:
            raise ParseError(f"face {f} is not a triangle", last)
        tri = ints[1:4]
        if any(not 0 <= v < nv for v in tri):
            raise ParseError(f"face {f} index out of range 0..{nv - 1}", last)
        if len(set(tri)) != 3:
            raise ParseError(f"face {f} repeats a vertex", last)
        tris.append(tri)
    if values is not None:
        values = np.asarray(values, dtype=float)
        if len(values) != nv:
            raise ParseError(f"{len(values)} values given for {nv} vertices")
    sc = SimplicialComplex.from_triangles(tris, nv, pos, values)
    bad = _bad_edges(sc.simplices[2])
    if bad:
        warnings.warn(f"{len(bad)} edges do not border exactly two triangles, e.g. {bad[0]}",
                      NonManifoldWarning)
    return sc


def parse_values(text: str) -> np.ndarray:
    out = []
    for lineno, toks in _data_lines(text):
        try:
            out.append(float(toks[0]))
        except ValueError:
            raise ParseError(f"not a number: {toks[0]!r}", lineno)
    return np.array(out)


def read_mesh(path, values_path=None) -> SimplicialComplex:
    values = parse_values(Path(values_path).read_text()) if values_path else None
    return load_mesh(Path(path).read_text(), values)


def to_off(sc: SimplicialComplex) -> str:
    nv, ne, nf = sc.f_vector
    pos = sc.positions if sc.positions is not None else np.zeros((nv, 3))
    lines = ["OFF", f"{nv} {nf} {ne}"]
    lines += [" ".join(f"{c:.12g}" for c in p) for p in pos]
    lines += ["3 " + " ".join(str(v) for v in t) for t in sc.simplices[2]]
    return "\n".join(lines) + "\n"


def boundary_matrices(sc: SimplicialComplex) -> List[sps.csr_matrix]:
    return [sc.boundary_matrix(k) for k in range(sc.dim + 1)]


def simplicial_homology(sc: SimplicialComplex) -> HomologyProfile:
    return homology_of_complex(sc.f_vector, boundary_matrices(sc))


def subdivide(sc: SimplicialComplex) -> SimplicialComplex:
    """1 -> 4 midpoint subdivision; positions and values are averaged."""
    nv = sc.f_vector[0]
    mid = {e: nv + i for i, e in enumerate(sc.simplices[1])}
    tris = []
    for a, b, c in sc.simplices[2]:
        ab, bc, ac = mid[(a, b)], mid[(b, c)], mid[(a, c)]
        tris += [(a, ab, ac), (b, bc, ab), (c, ac, bc), (ab, bc, ac)]

    def extend(arr):
        if arr is None:
            return None
        extra = np.array([(arr[a] + arr[b]) / 2 for a, b in sc.simplices[1]])
        return np.concatenate([arr, extra.reshape((-1,) + arr.shape[1:])])

    return SimplicialComplex.from_triangles(tris, nv + len(mid), extend(sc.positions),
                                            extend(sc.vertex_values))


# -- sublevel filtration ----------------------------------------------------------

def relative_homology_ranks(sc: SimplicialComplex, sub_hi: np.ndarray, sub_lo: np.ndarray):
    """Betti numbers and torsion of ``H_*(K_hi, K_lo)`` for full subcomplexes.

    ``sub_hi`` and ``sub_lo`` are boolean vertex masks with ``lo <= hi``.
    """
    keep = []
    for k in range(sc.dim + 1):
        keep.append([i for i, s in enumerate(sc.simplices[k])
                     if all(sub_hi[v] for v in s) and not all(sub_lo[v] for v in s)])
    ranks = [len(x) for x in keep]
    bs = [sps.csr_matrix((0, ranks[0]), dtype=np.int64)]
    for k in range(1, sc.dim + 1):
        full = sc.boundary_matrix(k)
        bs.append(full[keep[k - 1], :][:, keep[k]])
    return homology_of_complex(ranks, bs)


@dataclass
class FiltrationStep:
    lower: Optional[float]
    upper: Optional[float]
    expected: Tuple[int, ...]
    observed: Tuple[int, ...]
    torsion: Tuple[Tuple[int, ...], ...]

    @property
    def ok(self):
        return self.expected == self.observed and not any(self.torsion)

    def as_dict(self):
        return {"lower": self.lower, "upper": self.upper, "expected": list(self.expected),
                "observed": list(self.observed), "torsion": [list(t) for t in self.torsion],
                "ok": self.ok}


@dataclass
class FiltrationReport:
    thresholds: Tuple[float, ...]
    steps: List[FiltrationStep] = field(default_factory=list)

    @property
    def passed(self):
        return all(s.ok for s in self.steps)

    def as_dict(self):
        return {"thresholds": list(self.thresholds), "passed": self.passed,
                "steps": [s.as_dict() for s in self.steps]}


def default_thresholds(values: Sequence[float], tol: float = 1e-9) -> List[float]:
    """Midpoints between consecutive distinct critical values."""
    vs = sorted(values)
    distinct = [vs[0]] if vs else []
    for v in vs[1:]:
        if v - distinct[-1] > tol:
            distinct.append(v)
    return [(a + b) / 2 for a, b in zip(distinct, distinct[1:])]


def sublevel_filtration_check(sc: SimplicialComplex, critical: Sequence[Tuple[float, int]],
                              thresholds: Optional[Sequence[float]] = None,
                              tol: float = 1e-9) -> FiltrationReport:
    """Compare ``H_i(K_t, K_s)`` against the critical points in ``(s, t]``.

    ``critical`` holds ``(value, index)`` pairs.  For each interval between
    consecutive thresholds (the first starting at the empty set, the last
    ending at the whole complex) the expected rank in degree ``i`` is the
    number of index-``i`` critical values in the interval.
    """
    if sc.vertex_values is None:
        raise ValueError("sublevel filtration needs vertex values")
    if thresholds is None:
        thresholds = default_thresholds([v for v, _ in critical], tol)
    thresholds = sorted(float(t) for t in thresholds)
    for t in thresholds:
        for v, _ in critical:
            if abs(t - v) <= tol:
                raise ThresholdOnCriticalValue(f"threshold {t} equals critical value {v}")
    vals = sc.vertex_values
    bounds = [None] + thresholds + [None]
    report = FiltrationReport(tuple(thresholds))
    for lo, hi in zip(bounds, bounds[1:]):
        sub_lo = np.zeros(len(vals), bool) if lo is None else vals <= lo
        sub_hi = np.ones(len(vals), bool) if hi is None else vals <= hi
        expected = [0] * (sc.dim + 1)
        for v, idx in critical:
            if (lo is None or v > lo) and (hi is None or v <= hi):
                expected[idx] += 1
        prof = relative_homology_ranks(sc, sub_hi, sub_lo)
        report.steps.append(FiltrationStep(lo, hi, tuple(expected),
                                           prof.betti, prof.torsion))
    return report
