"""The Morse-Witten chain complex assembled from signed connections."""

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT, Config
from .critical import CriticalPoint
from .flow import Connection, enumerate_connections


@dataclass(frozen=True)
class MorseComplex:
    """``generators[k]`` lists critical point ids of index k in basis order.

    ``boundaries[k]`` is the integer matrix of ``d_k : C_k -> C_{k-1}`` with
    shape ``(len(generators[k-1]), len(generators[k]))``; ``boundaries[0]``
    has zero rows.
    """

    generators: Tuple[Tuple[int, ...], ...]
    boundaries: Tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return len(self.generators) - 1

    @property
    def ranks(self) -> Tuple[int, ...]:
        return tuple(len(g) for g in self.generators)

    def as_dict(self):
        return {
            "ranks": list(self.ranks),
            "boundaries": [B.astype(int).tolist() for B in self.boundaries],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        ranks = [int(r) for r in data["ranks"]]
        gens, offset = [], 0
        for r in ranks:
            gens.append(tuple(range(offset, offset + r)))
            offset += r
        bs = []
        for k, r in enumerate(ranks):
            rows = ranks[k - 1] if k > 0 else 0
            raw = data["boundaries"][k] if k < len(data["boundaries"]) else []
            B = np.array(raw, dtype=np.int64).reshape(rows, r) if rows * r else np.zeros((rows, r), np.int64)
            bs.append(B)
        return cls(tuple(gens), tuple(bs))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def rank(cx: MorseComplex, k: int) -> int:
    return cx.ranks[k] if 0 <= k <= cx.dim else 0


def boundary_matrix(cx: MorseComplex, k: int) -> np.ndarray:
    """Stored ``d_k``; degrees outside ``[0, dim]`` give a correctly shaped empty matrix."""
    if 0 <= k <= cx.dim:
        return cx.boundaries[k]
    return np.zeros((rank(cx, k - 1), rank(cx, k)), dtype=np.int64)


def verify_chain_complex(cx: MorseComplex) -> Tuple[bool, Optional[int]]:
    """``(True, None)`` iff every composition ``d_{k-1} d_k`` vanishes.

    Otherwise ``(False, k)`` for the smallest failing ``k``.
    """
    for k in range(1, cx.dim + 1):
        prod = boundary_matrix(cx, k - 1).astype(object) @ boundary_matrix(cx, k).astype(object)
        if np.any(prod != 0):
            return False, k
    return True, None


def from_matrices(boundaries: Sequence) -> MorseComplex:
    """Complex from ``[d_1, d_2, ...]`` alone, with anonymous generators."""
    mats = [np.atleast_2d(np.array(B, dtype=np.int64)) for B in boundaries]
    ranks = [mats[0].shape[0]] + [B.shape[1] for B in mats] if mats else [0]
    data = {"ranks": ranks,
            "boundaries": [[]] + [B.tolist() for B in mats]}
    return MorseComplex.from_dict(data)


def generator_order(cps: Sequence[CriticalPoint], dim: int = 2) -> Tuple[Tuple[int, ...], ...]:
    gens = []
    for k in range(dim + 1):
        of_k = sorted((c for c in cps if c.index == k), key=lambda c: (c.value, c.id))
        gens.append(tuple(c.id for c in of_k))
    return tuple(gens)


def build_morse_complex(cps: Sequence[CriticalPoint], connections: Sequence[Connection],
                        dim: int = 2) -> MorseComplex:
    """Entry ``(q, p)`` of ``d_k`` is the sum of signs of connections from p to q."""
    gens = generator_order(cps, dim)
    pos = [{ident: i for i, ident in enumerate(g)} for g in gens]
    index_of = {c.id: c.index for c in cps}
    bs = [np.zeros((0, len(gens[0])), dtype=np.int64)]
    for k in range(1, dim + 1):
        bs.append(np.zeros((len(gens[k - 1]), len(gens[k])), dtype=np.int64))
    for conn in connections:
        k = index_of[conn.source]
        bs[k][pos[k - 1][conn.target], pos[k][conn.source]] += conn.sign
    return MorseComplex(gens, tuple(bs))


def adjacent_pairs(cps: Sequence[CriticalPoint]) -> List[Tuple[CriticalPoint, CriticalPoint]]:
    pairs = [(p, q) for p in cps for q in cps if p.index - q.index == 1]
    return sorted(pairs, key=lambda pq: (pq[0].index, pq[0].id, pq[1].id))


def _pair_job(args):
    surface, field, p, q, cps, cfg = args
    return enumerate_connections(surface, field, p, q, cps, cfg)


def all_connections(surface, field, cps: Sequence[CriticalPoint],
                    cfg: Config = DEFAULT) -> Dict[Tuple[int, int], List[Connection]]:
    """Connections for every index-adjacent pair, keyed by ``(source, target)``.

    With ``cfg.jobs > 1`` pairs are enumerated in a process pool; the result
    does not depend on the number of workers.
    """
    pairs = adjacent_pairs(cps)
    jobs = [(surface, field, p, q, list(cps), cfg) for p, q in pairs]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_pair_job, jobs))
    else:
        results = [_pair_job(j) for j in jobs]
    return {(p.id, q.id): r for (p, q), r in zip(pairs, results)}
