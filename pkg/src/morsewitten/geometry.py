"""Implicit surfaces in R^3 with the induced metric, and scalar fields on them.

A surface is the zero set of a smooth constraint ``G``.  With the metric
induced from the ambient Euclidean space, the gradient of ``f|_M`` is the
tangential projection of the ambient gradient, and at a critical point the
Hessian of ``f|_M`` is ``P (Hf - lam HG) P`` with ``lam`` the Lagrange
multiplier ``<grad f, grad G> / |grad G|^2``.

All callables stored on the dataclasses are module-level functions or
``functools.partial`` objects over them, so surfaces and fields pickle
cleanly for process pools.
"""

from dataclasses import dataclass
from functools import partial
from typing import Callable, Tuple

import numpy as np

from .config import DEFAULT, Config
from .errors import NonConvergence, NotCritical, OffSurface

Vector = np.ndarray
Box = Tuple[Tuple[float, float], Tuple[float, float], Tuple[float, float]]


@dataclass(frozen=True)
class ImplicitSurface:
    constraint: Callable[[Vector], float]
    constraint_gradient: Callable[[Vector], Vector]
    constraint_hessian: Callable[[Vector], np.ndarray]
    bounding_box: Box
    name: str = "surface"
    dim: int = 2

    def contains(self, x, pad=0.0):
        return all(lo - pad <= xi <= hi + pad for xi, (lo, hi) in zip(x, self.bounding_box))

    def normal(self, x):
        g = self.constraint_gradient(x)
        return g / np.linalg.norm(g)


@dataclass(frozen=True)
class ScalarField:
    value: Callable[[Vector], float]
    gradient: Callable[[Vector], Vector]
    hessian: Callable[[Vector], np.ndarray]
    name: str = "f"


@dataclass(frozen=True)
class TangentFrame:
    base_point: Vector
    e1: Vector
    e2: Vector

    def vectors(self):
        return (self.e1, self.e2)

    def to_ambient(self, coords):
        return coords[0] * self.e1 + coords[1] * self.e2


# -- constraint functions ---------------------------------------------------

def _sphere_G(x, radius, center):
    d = x - center
    return float(d @ d - radius * radius)


def _sphere_dG(x, radius, center):
    return 2.0 * (x - center)


def _sphere_HG(x, radius, center):
    return 2.0 * np.eye(3)


def _torus_G(x, R, r, axis):
    a, b, c = x[axis], x[(axis + 1) % 3], x[(axis + 2) % 3]
    rho = np.hypot(b, c)
    return float((rho - R) ** 2 + a * a - r * r)


def _torus_dG(x, R, r, axis):
    ia, ib, ic = axis, (axis + 1) % 3, (axis + 2) % 3
    b, c = x[ib], x[ic]
    rho = np.hypot(b, c)
    k = 2.0 * (rho - R) / rho
    g = np.empty(3)
    g[ia] = 2.0 * x[ia]
    g[ib] = k * b
    g[ic] = k * c
    return g


def _torus_HG(x, R, r, axis):
    ia, ib, ic = axis, (axis + 1) % 3, (axis + 2) % 3
    b, c = x[ib], x[ic]
    rho3 = np.hypot(b, c) ** 3
    H = np.zeros((3, 3))
    H[ia, ia] = 2.0
    H[ib, ib] = 2.0 - 2.0 * R * c * c / rho3
    H[ic, ic] = 2.0 - 2.0 * R * b * b / rho3
    H[ib, ic] = H[ic, ib] = 2.0 * R * b * c / rho3
    return H


def sphere(radius=1.0, center=(0.0, 0.0, 0.0)):
    center = np.asarray(center, dtype=float)
    pad = radius
    box = tuple((float(ci - radius - pad), float(ci + radius + pad)) for ci in center)
    return ImplicitSurface(
        partial(_sphere_G, radius=radius, center=center),
        partial(_sphere_dG, radius=radius, center=center),
        partial(_sphere_HG, radius=radius, center=center),
        box,
        name=f"sphere(r={radius})",
    )


def torus(R=2.0, r=1.0, axis=2):
    """Torus of revolution about coordinate ``axis`` (0=x, 1=y, 2=z)."""
    if not 0 < r < R:
        raise ValueError("torus needs 0 < r < R")
    pad = r
    box = [None, None, None]
    box[axis] = (-r - pad, r + pad)
    box[(axis + 1) % 3] = (-R - r - pad, R + r + pad)
    box[(axis + 2) % 3] = (-R - r - pad, R + r + pad)
    return ImplicitSurface(
        partial(_torus_G, R=R, r=r, axis=axis),
        partial(_torus_dG, R=R, r=r, axis=axis),
        partial(_torus_HG, R=R, r=r, axis=axis),
        tuple(box),
        name=f"torus(R={R}, r={r}, axis={'xyz'[axis]})",
    )


# -- scalar fields ------------------------------------------------------------

def _quad_value(x, linear, quad):
    return float(linear @ x + x @ quad @ x)


def _quad_gradient(x, linear, quad):
    return linear + 2.0 * (quad @ x)


def _quad_hessian(x, linear, quad):
    return 2.0 * quad


def quadratic_field(linear, quad=None, name="f"):
    """``f(x) = <linear, x> + x^T quad x`` with ``quad`` symmetrized."""
    linear = np.asarray(linear, dtype=float)
    quad = np.zeros((3, 3)) if quad is None else np.asarray(quad, dtype=float)
    quad = 0.5 * (quad + quad.T)
    return ScalarField(
        partial(_quad_value, linear=linear, quad=quad),
        partial(_quad_gradient, linear=linear, quad=quad),
        partial(_quad_hessian, linear=linear, quad=quad),
        name=name,
    )


def height(eps_x=0.0, eps_y=0.0):
    return quadratic_field([eps_x, eps_y, 1.0], name=f"z+{eps_x}x+{eps_y}y")


# -- operations ---------------------------------------------------------------

def project_to_surface(x, surface: ImplicitSurface, cfg: Config = DEFAULT):
    """Newton iteration along the constraint gradient onto ``G = 0``."""
    x = np.array(x, dtype=float)
    if not surface.contains(x):
        raise OffSurface(f"{x} lies outside the bounding box of {surface.name}")
    for _ in range(cfg.max_newton):
        G = surface.constraint(x)
        if abs(G) <= cfg.proj_tol:
            return x
        g = surface.constraint_gradient(x)
        gg = g @ g
        if not np.isfinite(gg) or gg < 1e-300:
            break
        x = x - (G / gg) * g
    G = surface.constraint(x)
    if abs(G) <= cfg.proj_tol:
        return x
    raise NonConvergence(f"projection onto {surface.name} failed (|G|={abs(G):.3e})")


def tangent_project(surface, x, v):
    n = surface.normal(x)
    return v - (v @ n) * n


def riemannian_gradient(surface, field, x, cfg: Config = DEFAULT):
    x = np.asarray(x, dtype=float)
    if abs(surface.constraint(x)) > cfg.proj_tol:
        raise OffSurface(f"|G(x)| = {abs(surface.constraint(x)):.3e} > {cfg.proj_tol}")
    return tangent_project(surface, x, field.gradient(x))


def tangent_frame(surface, x):
    """Right-handed orthonormal tangent frame: det(n, e1, e2) = +1."""
    x = np.asarray(x, dtype=float)
    n = surface.normal(x)
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(n)))] = 1.0
    e1 = axis - (axis @ n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return TangentFrame(x, e1, e2)


def lagrange_multiplier(surface, field, x):
    g = surface.constraint_gradient(x)
    return float(field.gradient(x) @ g / (g @ g))


def constrained_hessian(surface, field, x):
    """Ambient 3x3 matrix ``Hf - lam HG`` (before tangential restriction)."""
    lam = lagrange_multiplier(surface, field, x)
    return field.hessian(x) - lam * surface.constraint_hessian(x)


def restricted_hessian(surface, field, x, frame: TangentFrame = None, cfg: Config = DEFAULT):
    x = np.asarray(x, dtype=float)
    grad = riemannian_gradient(surface, field, x, cfg)
    gnorm = float(np.linalg.norm(grad))
    if gnorm > cfg.crit_tol:
        raise NotCritical(f"restricted gradient norm {gnorm:.3e} exceeds {cfg.crit_tol}")
    if frame is None:
        frame = tangent_frame(surface, x)
    A = constrained_hessian(surface, field, x)
    es = frame.vectors()
    H = np.empty((2, 2))
    for i in range(2):
        for j in range(i, 2):
            H[i, j] = es[i] @ A @ es[j]
            H[j, i] = H[i, j]
    return H


def negative_gradient_field(surface, field):
    """Closure ``x -> -grad f|_M`` usable off the surface (for RK stages)."""
    dG = surface.constraint_gradient
    df = field.gradient

    def F(x):
        g = df(x)
        n = dG(x)
        return (n * ((g @ n) / (n @ n))) - g

    return F
