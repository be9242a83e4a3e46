"""Locating and classifying critical points of ``f|_M``."""

import itertools
import warnings
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from .config import DEFAULT, Config
from .errors import DegenerateCritical, MorseError, NonConvergence, SeedExhaustion
from .geometry import (
    ImplicitSurface,
    ScalarField,
    project_to_surface,
    restricted_hessian,
    riemannian_gradient,
    tangent_frame,
)


@dataclass(frozen=True)
class CriticalPoint:
    """A nondegenerate critical point.

    ``eigenvectors`` holds ambient unit eigenvectors of the restricted
    Hessian in ascending eigenvalue order; the first ``index`` of them make
    up ``unstable_frame`` and fix the orientation of the unstable manifold.
    """

    position: np.ndarray
    value: float
    index: int
    hessian_eigenvalues: Tuple[float, ...]
    eigenvectors: Tuple[np.ndarray, ...]
    unstable_frame: Tuple[np.ndarray, ...]
    id: int = -1

    @property
    def stable_frame(self):
        return self.eigenvectors[self.index:]

    def flipped(self):
        """Same point with the opposite orientation of its unstable manifold."""
        if self.index == 0:
            return self
        frame = (-self.unstable_frame[0],) + tuple(self.unstable_frame[1:])
        return replace(self, unstable_frame=frame)

    def as_dict(self):
        return {
            "id": self.id,
            "position": [round(float(c), 10) + 0.0 for c in self.position],
            "value": round(float(self.value), 10) + 0.0,
            "index": self.index,
            "eigenvalues": [round(float(v), 10) for v in self.hessian_eigenvalues],
        }


def morse_index(cp: CriticalPoint) -> int:
    return sum(1 for lam in cp.hessian_eigenvalues if lam < 0)


def canonical_sign(v, tie_tol=1e-9):
    """Flip ``v`` so its largest-magnitude component is positive.

    Among components tied (to ``tie_tol``) for largest magnitude, the first
    one decides.
    """
    a = np.abs(v)
    top = a.max()
    k = int(np.flatnonzero(a >= top - tie_tol)[0])
    return v if v[k] > 0 else -v


def _lagrange_newton(surface, field, x, cfg):
    g = surface.constraint_gradient(x)
    lam = float(field.gradient(x) @ g / (g @ g))

    def residual(x, lam):
        return np.concatenate([field.gradient(x) - lam * surface.constraint_gradient(x),
                               [surface.constraint(x)]])

    r = residual(x, lam)
    rn = np.linalg.norm(r)
    for _ in range(cfg.max_newton):
        if rn < 1e-13:
            break
        J = np.zeros((4, 4))
        dG = surface.constraint_gradient(x)
        J[:3, :3] = field.hessian(x) - lam * surface.constraint_hessian(x)
        J[:3, 3] = -dG
        J[3, :3] = dG
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            raise NonConvergence("singular Lagrange Jacobian")
        t = 1.0
        for _ in range(12):
            xn, ln = x + t * step[:3], lam + t * step[3]
            if surface.contains(xn):
                rn_new = np.linalg.norm(residual(xn, ln))
                if rn_new < rn:
                    break
            t *= 0.5
        else:
            raise NonConvergence("Newton line search stalled")
        x, lam, rn = xn, ln, rn_new
        r = residual(x, lam)
    if rn > 1e-9:
        raise NonConvergence(f"Lagrange residual {rn:.3e}")
    return x


def polish(surface: ImplicitSurface, field: ScalarField, x, cfg: Config = DEFAULT):
    """Newton-polish ``x`` to a critical point of ``f|_M`` on the surface."""
    x = _lagrange_newton(surface, field, np.asarray(x, dtype=float), cfg)
    x = project_to_surface(x, surface, cfg)
    gn = np.linalg.norm(riemannian_gradient(surface, field, x, cfg))
    if gn > cfg.crit_tol:
        raise NonConvergence(f"polished point has gradient norm {gn:.3e}")
    return x


def classify(surface, field, x, cfg: Config = DEFAULT) -> CriticalPoint:
    frame = tangent_frame(surface, x)
    H = restricted_hessian(surface, field, x, frame, cfg)
    evals, evecs = np.linalg.eigh(H)
    if np.min(np.abs(evals)) < cfg.nondegen_tol:
        raise DegenerateCritical(
            f"critical point {x} has Hessian eigenvalues {evals} (|lam| < {cfg.nondegen_tol})")
    ambient = tuple(canonical_sign(frame.to_ambient(evecs[:, i])) for i in range(2))
    index = int(np.sum(evals < 0))
    return CriticalPoint(
        position=x,
        value=field.value(x),
        index=index,
        hessian_eigenvalues=tuple(float(v) for v in evals),
        eigenvectors=ambient,
        unstable_frame=ambient[:index],
    )


def seed_grid(surface, n):
    axes = [lo + (np.arange(n) + 0.5) * (hi - lo) / n for lo, hi in surface.bounding_box]
    for p in itertools.product(*axes):
        yield np.array(p)


def _search(surface, field, n, cfg):
    found: List[np.ndarray] = []
    for seed in seed_grid(surface, n):
        try:
            with np.errstate(all="ignore"):
                x0 = project_to_surface(seed, surface, cfg)
                x = polish(surface, field, x0, cfg)
        except MorseError:
            continue
        if all(np.linalg.norm(x - y) > cfg.dedup_radius for y in found):
            found.append(x)
    return found


def _same_set(a, b, radius):
    if len(a) != len(b):
        return False
    return all(any(np.linalg.norm(x - y) <= radius for y in b) for x in a)


def find_critical_points(surface: ImplicitSurface, field: ScalarField,
                         cfg: Config = DEFAULT, refine: bool = True) -> List[CriticalPoint]:
    """All critical points, seeded from a uniform grid over the bounding box.

    With ``refine`` the search is repeated at double grid density and a
    ``SeedExhaustion`` warning is issued when the answers differ; the denser
    answer is kept.
    """
    points = _search(surface, field, cfg.grid, cfg)
    if refine:
        finer = _search(surface, field, 2 * cfg.grid, cfg)
        if not _same_set(points, finer, cfg.dedup_radius):
            warnings.warn(
                f"critical set changed under grid refinement ({len(points)} -> {len(finer)})",
                SeedExhaustion)
            points = finer
    cps = [classify(surface, field, x, cfg) for x in points]
    return number(cps)


def number(cps: List[CriticalPoint]) -> List[CriticalPoint]:
    """Assign stable ids by (index, value, position) and sort by (value, id)."""
    key = lambda c: (c.index, round(c.value, 9), tuple(np.round(c.position, 6)))
    ordered = sorted(cps, key=key)
    numbered = [replace(c, id=i) for i, c in enumerate(ordered)]
    return sorted(numbered, key=lambda c: (c.value, c.id))


def by_id(cps, ident) -> Optional[CriticalPoint]:
    for c in cps:
        if c.id == ident:
            return c
    return None


def counts_by_index(cps, dim=2):
    counts = [0] * (dim + 1)
    for c in cps:
        counts[c.index] += 1
    return counts


def euler_characteristic(cps, dim=2):
    return sum((-1) ** k * n for k, n in enumerate(counts_by_index(cps, dim)))
