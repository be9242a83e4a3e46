"""Negative gradient flow on the surface and the flow lines between critical points.

Trajectories are integrated with an adaptive Dormand-Prince 5(4) pair and
re-projected onto the surface after every accepted step.  Connections from
``p`` to ``q`` (index drop one) are found by shooting from the unstable
seeds of ``p``; membership of a flow line in the stable manifold of ``q``
is decided by its forward limit.
"""

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT, Config
from .critical import CriticalPoint
from .errors import (
    AmbiguousCluster,
    BlowUp,
    DegenerateFrame,
    IndexGap,
    MorseError,
    NonConvergence,
)
from .geometry import (
    ImplicitSurface,
    ScalarField,
    negative_gradient_field,
    project_to_surface,
    tangent_project,
)

UNRESOLVED = None


@dataclass
class Trajectory:
    times: np.ndarray
    points: np.ndarray
    forward_limit: Optional[int] = UNRESOLVED
    backward_limit: Optional[int] = UNRESOLVED
    stop: str = ""

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    def __len__(self):
        return len(self.times)

    def samples(self):
        return list(zip(self.times.tolist(), map(tuple, self.points.tolist())))


def concatenate(*parts: Trajectory) -> Trajectory:
    times, points = [parts[0].times], [parts[0].points]
    for seg in parts[1:]:
        times.append(seg.times - seg.times[0] + times[-1][-1])
        points.append(seg.points)
    return Trajectory(np.concatenate(times), np.concatenate(points),
                      forward_limit=parts[-1].forward_limit,
                      backward_limit=parts[0].backward_limit,
                      stop=parts[-1].stop)


# -- integrator -----------------------------------------------------------------

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
# fifth-order minus embedded fourth-order weights (7th stage weight -1/40)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


class _Stepper:
    """One projected Dormand-Prince step of the flow ``x' = sign * (-grad f)``."""

    def __init__(self, surface, field, direction, cfg):
        F = negative_gradient_field(surface, field)
        self.F = F if direction > 0 else (lambda x: -F(x))
        self.surface = surface
        self.cfg = cfg

    def step(self, x, h, k1=None):
        F = self.F
        ks = [F(x) if k1 is None else k1]
        for i in range(1, 6):
            xi = x + h * sum(a * k for a, k in zip(_A[i], ks))
            ks.append(F(xi))
        x5 = x + h * sum(b * k for b, k in zip(_B, ks))
        k7 = F(x5)
        err = h * (sum(e * k for e, k in zip(_E, ks)) + _E[6] * k7)
        return x5, err

    def error_norm(self, err, x, xn):
        tol = self.cfg.step_tol
        scale = tol + tol * np.maximum(np.abs(x), np.abs(xn))
        return float(np.max(np.abs(err) / scale))

    def project(self, x):
        return project_to_surface(x, self.surface, self.cfg)


def _nearest(x, cps):
    best, dist = None, math.inf
    for c in cps:
        d = float(np.linalg.norm(x - c.position))
        if d < dist:
            best, dist = c, d
    return best, dist


def _captured(x, speed, cps, cfg):
    if speed > cfg.limit_tol:
        return None
    c, d = _nearest(x, cps)
    if c is not None and d <= cfg.capture_radius:
        return c
    return None


def flow_segment(surface: ImplicitSurface, field: ScalarField, x0, cps: Sequence[CriticalPoint],
                 cfg: Config = DEFAULT, direction: int = 1, stop_level: Optional[float] = None,
                 until: Optional[Callable[[np.ndarray], Optional[str]]] = None,
                 h0: float = 0.02) -> Trajectory:
    """Integrate one way from ``x0``.

    ``direction=+1`` follows ``-grad f`` (forward time), ``-1`` follows
    ``+grad f`` with negative times.  Stops on capture by a critical point,
    on reaching ``f = stop_level`` (located exactly), when ``until(x)``
    returns a label, or at ``cfg.max_time`` (limit left unresolved).
    """
    stepper = _Stepper(surface, field, direction, cfg)
    x = stepper.project(np.asarray(x0, dtype=float))
    sgn = 1.0 if direction > 0 else -1.0
    t, h = 0.0, h0
    times, points = [0.0], [x]
    limit, stop = UNRESOLVED, "max_time"

    k1 = stepper.F(x)
    c = _captured(x, float(np.linalg.norm(k1)), cps, cfg)
    if c is not None:
        return _finish(times, points, c.id, "captured", direction)
    if stop_level is not None and sgn * (field.value(x) - stop_level) <= 0:
        return _finish(times, points, UNRESOLVED, "level", direction)

    steps = 0
    while t < cfg.max_time and steps < cfg.max_steps:
        steps += 1
        xn, err = stepper.step(x, h, k1)
        en = stepper.error_norm(err, x, xn)
        if en > 1.0 or not np.isfinite(en):
            h *= max(0.2, 0.9 * en ** -0.2) if np.isfinite(en) else 0.2
            if h < 1e-14:
                raise NonConvergence("step size underflow")
            continue
        try:
            xn = stepper.project(xn)
        except MorseError:
            if not surface.contains(xn):
                raise BlowUp(f"trajectory left the bounding box at {xn}")
            h *= 0.5
            continue
        if not surface.contains(xn):
            raise BlowUp(f"trajectory left the bounding box at {xn}")

        if stop_level is not None and sgn * (field.value(xn) - stop_level) <= 0:
            hs, xs = _locate_level(stepper, field, x, h, stop_level)
            times.append(t + hs)
            points.append(xs)
            limit, stop = UNRESOLVED, "level"
            break

        t += h
        x = xn
        times.append(t)
        points.append(x)
        k1 = stepper.F(x)
        c = _captured(x, float(np.linalg.norm(k1)), cps, cfg)
        if c is not None:
            limit, stop = c.id, "captured"
            break
        if until is not None:
            label = until(x)
            if label is not None:
                stop = label
                break
        h *= min(5.0, max(0.2, 0.9 * en ** -0.2)) if en > 0 else 5.0
    return _finish(times, points, limit, stop, direction)


def _finish(times, points, limit, stop, direction):
    times = np.asarray(times)
    points = np.asarray(points)
    if direction > 0:
        return Trajectory(times, points, forward_limit=limit, stop=stop)
    return Trajectory(-times[::-1], points[::-1], backward_limit=limit, stop=stop)


def _locate_level(stepper, field, x, h, level):
    """Step length ``s`` in (0, h] with ``f(step(x, s)) = level`` (Illinois)."""

    def phi(s):
        xs = stepper.project(stepper.step(x, s)[0])
        return field.value(xs) - level, xs

    lo, flo = 0.0, field.value(x) - level
    hi, (fhi, xhi) = h, phi(h)
    best = (hi, xhi, fhi)
    side = 0
    for _ in range(60):
        s = hi - fhi * (hi - lo) / (fhi - flo) if fhi != flo else 0.5 * (lo + hi)
        if not lo < s < hi:
            s = 0.5 * (lo + hi)
        fs, xs = phi(s)
        best = (s, xs, fs)
        if abs(fs) <= 1e-13 or hi - lo < 1e-15:
            break
        if (fs > 0) == (flo > 0):
            lo, flo = s, fs
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = s, fs
            if side == 1:
                flo *= 0.5
            side = 1
    return best[0], best[1]


def integrate_flow(surface: ImplicitSurface, field: ScalarField, x0,
                   cps: Sequence[CriticalPoint], cfg: Config = DEFAULT) -> Trajectory:
    """The full flow line through ``x0``, both time directions, with labelled limits."""
    fwd = flow_segment(surface, field, x0, cps, cfg, direction=1)
    bwd = flow_segment(surface, field, x0, cps, cfg, direction=-1)
    times = np.concatenate([bwd.times[:-1], fwd.times])
    points = np.concatenate([bwd.points[:-1], fwd.points])
    return Trajectory(times, points, forward_limit=fwd.forward_limit,
                      backward_limit=bwd.backward_limit, stop=fwd.stop)


# -- unstable manifolds ------------------------------------------------------------

def seed_direction(cp: CriticalPoint, k: int, count: int):
    if cp.index == 1:
        return cp.unstable_frame[0] * (1.0 if k == 0 else -1.0)
    u1, u2 = cp.unstable_frame
    theta = 2.0 * math.pi * k / count
    return math.cos(theta) * u1 + math.sin(theta) * u2


def ray_offset(cp: CriticalPoint, phi: float):
    """Tangent offset (unit scale) of the flow line at angle ``phi`` around a maximum.

    In coordinates ``x_i -> sign(x_i) |x_i|^(a_min / a_i)`` the linearized
    unstable flow lines of a node with rates ``a_i`` are straight rays, so
    equal steps in ``phi`` sample flow lines evenly even when the rates differ.
    For equal rates this is the plain circle.
    """
    rates = [abs(v) for v in cp.hessian_eigenvalues[:2]]
    lo = min(rates)
    c, s = math.cos(phi), math.sin(phi)
    x = math.copysign(abs(c) ** (rates[0] / lo), c)
    y = math.copysign(abs(s) ** (rates[1] / lo), s)
    return x * cp.unstable_frame[0] + y * cp.unstable_frame[1]


def unstable_seeds(surface: ImplicitSurface, cp: CriticalPoint, radius: float,
                   count: int = 64, cfg: Config = DEFAULT, warp: bool = False) -> List[np.ndarray]:
    """Points of the linearized unstable manifold near ``cp``.

    Index-2 seeds run counterclockwise with respect to ``cp.unstable_frame``;
    they sit on the circle of ``radius``, or with ``warp`` on the curve
    given by ``ray_offset``.
    """
    if cp.index == 0:
        return []
    if cp.index == 1:
        return [project_to_surface(cp.position + radius * seed_direction(cp, k, 2), surface, cfg)
                for k in range(2)]
    offset = ((lambda k: ray_offset(cp, 2.0 * math.pi * k / count)) if warp
              else (lambda k: seed_direction(cp, k, count)))
    return [project_to_surface(cp.position + radius * offset(k), surface, cfg)
            for k in range(count)]


# -- connections ----------------------------------------------------------------

@dataclass
class Connection:
    source: int
    target: int
    representative: Trajectory
    crossing: np.ndarray
    level: float
    departure: np.ndarray
    arrival: np.ndarray
    sign: int = 0

    def as_dict(self):
        return {
            "source": self.source,
            "target": self.target,
            "sign": self.sign,
            "level": round(float(self.level), 10),
            "crossing": [round(float(c), 8) for c in self.crossing],
        }


def regular_value(p: CriticalPoint, q: CriticalPoint, cps: Sequence[CriticalPoint],
                  fraction: float = 0.5) -> float:
    """Regular level between ``f(q)`` and ``f(p)`` with no critical value in ``[a, f(p))``."""
    lo, hi = q.value, p.value
    inner = [c.value for c in cps if lo < c.value < hi
             and abs(c.value - lo) > 1e-12 and abs(c.value - hi) > 1e-12]
    if inner:
        lo = max(inner)
    return lo + fraction * (hi - lo)


def project_to_level(surface, field, x, level, cfg: Config = DEFAULT):
    """Newton onto the curve ``{G = 0, f = level}`` (minimum-norm steps)."""
    x = np.asarray(x, dtype=float)
    for _ in range(cfg.max_newton):
        r = np.array([surface.constraint(x), field.value(x) - level])
        if abs(r[0]) <= cfg.proj_tol and abs(r[1]) <= 1e-13:
            return x
        J = np.vstack([surface.constraint_gradient(x), field.gradient(x)])
        x = x - J.T @ np.linalg.solve(J @ J.T, r)
    raise NonConvergence("projection onto level curve failed")


def _unit(v):
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


class _Shooter:
    """Forward shots from the seeds of an index-2 point toward saddle ``q``."""

    def __init__(self, surface, field, p, q, cps, cfg, a, b):
        self.surface, self.field, self.p, self.q = surface, field, p, q
        self.cps, self.cfg, self.a, self.b = cps, cfg, a, b
        self.eu = q.unstable_frame[0]
        self.cache = {}

    def shoot(self, theta):
        theta = theta % (2.0 * math.pi)
        if theta in self.cache:
            return self.cache[theta]
        s, f, p, cfg = self.surface, self.field, self.p, self.cfg
        d = ray_offset(p, theta)
        x0 = project_to_surface(p.position + cfg.seed_radius * d, s, cfg)
        seg1 = flow_segment(s, f, x0, self.cps, cfg, stop_level=self.a)
        seg2 = None
        if seg1.stop == "level":
            seg2 = flow_segment(s, f, seg1.end, self.cps, cfg, stop_level=self.b)
        if seg2 is None or seg2.stop != "level":
            out = (seg1, seg2, d, math.nan, math.inf)
        else:
            y = seg2.end
            out = (seg1, seg2, d, float((y - self.q.position) @ self.eu),
                   float(np.linalg.norm(y - self.q.position)))
        self.cache[theta] = out
        return out

    def g(self, theta):
        return self.shoot(theta)[3]


def _side_run(surface, field, z, q, eu, cps, cfg, floor):
    """Follow ``z`` past saddle ``q``: 0 if captured by ``q``, else the exit side."""
    half = 0.5 * cfg.near_radius

    def until(x):
        if abs((x - q.position) @ eu) > half:
            return "exit"
        return None

    seg = flow_segment(surface, field, z, cps, cfg, stop_level=floor, until=until)
    if seg.forward_limit == q.id:
        return 0, seg
    s = float((seg.end - q.position) @ eu)
    return (1 if s > 0 else -1), seg


def _refine_on_stable_manifold(surface, field, y, q, cps, cfg, b, floor):
    """Bisect along the level curve ``f = b`` near ``y`` for the point flowing into ``q``."""
    eu = q.unstable_frame[0]
    tangent = _unit(tangent_project(surface, y, np.cross(surface.normal(y), field.gradient(y))))
    if tangent @ eu < 0:
        tangent = -tangent

    def point(u):
        return project_to_level(surface, field, y + u * tangent, b, cfg)

    s0, seg0 = _side_run(surface, field, y, q, eu, cps, cfg, floor)
    if s0 == 0:
        return y, seg0
    h = 1e-9
    while h < cfg.near_radius:
        lo, hi = -h, h
        s_lo, seg_lo = _side_run(surface, field, point(lo), q, eu, cps, cfg, floor)
        if s_lo == 0:
            return point(lo), seg_lo
        s_hi, seg_hi = _side_run(surface, field, point(hi), q, eu, cps, cfg, floor)
        if s_hi == 0:
            return point(hi), seg_hi
        if s_lo != s_hi:
            break
        h *= 10.0
    else:
        return None, None
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        z = point(mid)
        s, seg = _side_run(surface, field, z, q, eu, cps, cfg, floor)
        if s == 0:
            return z, seg
        if s == s_lo:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    return None, None


def _refined_angles(sh, thetas, spacing, max_shots=4000, min_width=1e-9):
    """Subdivide seed intervals until neighbouring level crossings are close.

    An interval is split while its two crossings are more than ``spacing``
    apart and the arc between them could reach the ``3 * spacing``
    neighbourhood of the saddle.  Intervals with an endpoint that never
    reaches the level (captured elsewhere) are left alone.
    """
    out = [thetas[0]]
    stack = [(thetas[i], thetas[i + 1]) for i in reversed(range(len(thetas) - 1))]
    shots = 0
    while stack:
        t0, t1 = stack.pop()
        y0, y1 = sh.shoot(t0), sh.shoot(t1)
        shots += 1
        split = False
        if np.isfinite(y0[4]) and np.isfinite(y1[4]) and t1 - t0 > min_width and shots < max_shots:
            gap = float(np.linalg.norm(y0[1].end - y1[1].end))
            split = gap > spacing and min(y0[4], y1[4]) < gap + 3 * spacing
        if split:
            mid = 0.5 * (t0 + t1)
            stack.append((mid, t1))
            stack.append((t0, mid))
        else:
            out.append(t1)
    return out


def _enumerate_from_max(surface, field, p, q, cps, cfg, a):
    rho = cfg.near_radius
    lam_s = max(q.hessian_eigenvalues)
    kappa = min(0.5 * lam_s * rho * rho, 0.5 * (a - q.value))
    b = q.value + kappa
    below = [c.value for c in cps if c.value < q.value - 1e-12]
    floor = q.value - min(kappa, 0.5 * (q.value - max(below))) if below else q.value - kappa
    others = [np.linalg.norm(c.position - q.position) for c in cps if c.id != q.id]
    far = max(3 * rho, 0.5 * min(others)) if others else math.inf

    sh = _Shooter(surface, field, p, q, cps, cfg, a, b)
    n = cfg.seeds
    thetas = _refined_angles(sh, [2.0 * math.pi * k / n for k in range(n + 1)], rho)

    found = []
    for t0, t1 in zip(thetas[:-1], thetas[1:]):
        _, _, _, g0, d0 = sh.shoot(t0)
        _, _, _, g1, d1 = sh.shoot(t1)
        if not (np.isfinite(g0) and np.isfinite(g1)) or g0 * g1 > 0 or g1 == 0:
            continue
        if min(d0, d1) > far:
            continue
        theta = t0 if g0 == 0 else brentq(sh.g, t0, t1, xtol=1e-14, maxiter=200)
        seg1, seg2, d, gval, dist = sh.shoot(theta)
        if dist > 3 * rho or abs(gval) > 1e-6:
            continue
        z, seg3 = _refine_on_stable_manifold(surface, field, seg2.end, q, cps, cfg, b, floor)
        if z is None:
            continue
        rep = concatenate(seg1, seg2, seg3)
        rep.backward_limit = p.id
        arrival = _unit(tangent_project(surface, q.position, z - q.position))
        found.append(Connection(p.id, q.id, rep, seg1.end, a, d, arrival))
    return found


def _enumerate_from_saddle(surface, field, p, q, cps, cfg, a):
    found = []
    for k in range(2):
        d = seed_direction(p, k, 2)
        x0 = project_to_surface(p.position + cfg.seed_radius * d, surface, cfg)
        seg1 = flow_segment(surface, field, x0, cps, cfg, stop_level=a)
        if seg1.stop != "level":
            continue
        seg2 = flow_segment(surface, field, seg1.end, cps, cfg)
        if seg2.forward_limit != q.id:
            continue
        rep = concatenate(seg1, seg2)
        rep.backward_limit = p.id
        tail = rep.points[max(0, len(rep) - 3)]
        arrival = _unit(tangent_project(surface, q.position, tail - q.position))
        found.append(Connection(p.id, q.id, rep, seg1.end, a, d, arrival))
    return found


def _cluster(conns, radius):
    kept: List[Connection] = []
    for c in sorted(conns, key=lambda c: tuple(np.round(c.crossing, 9))):
        dup = None
        for k in kept:
            if np.linalg.norm(k.crossing - c.crossing) < radius:
                dup = k
                break
        if dup is None:
            kept.append(c)
        elif (dup.arrival @ c.arrival) < 0 or dup.representative.forward_limit != c.representative.forward_limit:
            raise AmbiguousCluster(
                f"crossings {dup.crossing} and {c.crossing} coincide but reach {dup.target} differently")
    return kept


def enumerate_connections(surface: ImplicitSurface, field: ScalarField, p: CriticalPoint,
                          q: CriticalPoint, cps: Sequence[CriticalPoint],
                          cfg: Config = DEFAULT) -> List[Connection]:
    """Signed flow lines from ``p`` to ``q`` where ``index(p) = index(q) + 1``."""
    if p.index - q.index != 1:
        raise IndexGap(f"index({p.id}) - index({q.id}) = {p.index - q.index}, expected 1")
    a = regular_value(p, q, cps, cfg.level_fraction)
    if p.index == 2:
        conns = _enumerate_from_max(surface, field, p, q, cps, cfg, a)
    else:
        conns = _enumerate_from_saddle(surface, field, p, q, cps, cfg, a)
    conns = _cluster(conns, cfg.cluster_radius)
    for c in conns:
        c.sign = connection_sign(surface, field, c, p, q)
    return conns


def _det(n, u, v):
    return float(np.linalg.det(np.array([n, u, v])))


def connection_sign(surface: ImplicitSurface, field: ScalarField, conn: Connection,
                    p: CriticalPoint, q: CriticalPoint, tol: float = 1e-10) -> int:
    """Orientation sign of one flow line, evaluated at its level crossing.

    Orientations of tangent planes are compared through the surface normal:
    ``(v1, v2)`` is positive at ``x`` for the orientation transported from
    ``p`` iff ``s_p * det(n(x), v1, v2) > 0``.
    """
    x = conn.crossing
    n = surface.normal(x)
    w = -tangent_project(surface, x, field.gradient(x))
    if np.linalg.norm(w) < tol:
        raise DegenerateFrame(f"vanishing gradient at crossing {x}")
    w_hat = w / np.linalg.norm(w)

    if p.index == 1:
        # W_u(p) is a curve oriented by u_p; on the branch leaving along the
        # departure vector the orientation is (departure . u_p) * flow direction.
        branch = 1.0 if conn.departure @ p.unstable_frame[0] > 0 else -1.0
        tau = branch * w_hat
        point_orientation = 1.0  # index-0 target: TM/TW_s(q) = 0, canonically positive
        return int(np.sign(w_hat @ tau) * point_orientation)

    if p.index == 2:
        n_p = surface.normal(p.position)
        s_p = np.sign(_det(n_p, *p.unstable_frame))
        # b1 spans T(W_u(p) ∩ f^-1(a)) with (w, b1) positive for O_p
        b1 = s_p * np.cross(n, w_hat)
        # transversal orientation of W_s(q): at q, [v] > 0 iff <v, u_q> > 0,
        # i.e. det(n_q, tau_q, v) > 0 for the tangent tau_q of W_s(q).
        # Along the flow line the tangent is +-w; the arrival side fixes it.
        n_q = surface.normal(q.position)
        eps = np.sign(_det(n_q, -conn.arrival, q.unstable_frame[0]))
        if eps == 0:
            raise DegenerateFrame("arrival direction parallel to the unstable direction of q")
        tau = eps * w_hat
        d = _det(n, tau, b1)
        if abs(d) < tol:
            raise DegenerateFrame(f"dependent frame at crossing {x}")
        return int(np.sign(d))

    raise IndexGap(f"no connections out of an index-{p.index} point")


# -- Morse-Smale diagnostic -----------------------------------------------------

@dataclass
class MorseSmaleReport:
    violations: List[Tuple[int, int, str]] = dc_field(default_factory=list)
    unresolved: List[Tuple[int, str]] = dc_field(default_factory=list)

    @property
    def clean(self):
        return not self.violations and not self.unresolved

    def as_dict(self):
        return {
            "clean": self.clean,
            "violations": [{"source": s, "target": t, "detail": d} for s, t, d in self.violations],
            "unresolved": [{"source": s, "detail": d} for s, d in self.unresolved],
        }


def check_morse_smale(surface: ImplicitSurface, field: ScalarField,
                      cps: Sequence[CriticalPoint], cfg: Config = DEFAULT) -> MorseSmaleReport:
    """Order-1 transversality: no flow line may join two saddles.

    On a surface that is the only equal-index configuration, so both
    unstable branches of every saddle are traced to their limits.
    """
    report = MorseSmaleReport()
    index_of = {c.id: c.index for c in cps}
    for p in cps:
        if p.index != 1:
            continue
        for k, x0 in enumerate(unstable_seeds(surface, p, cfg.seed_radius, cfg=cfg)):
            branch = "+" if k == 0 else "-"
            try:
                traj = flow_segment(surface, field, x0, cps, cfg)
            except MorseError as exc:
                report.unresolved.append((p.id, f"branch {branch}: {exc}"))
                continue
            lim = traj.forward_limit
            if lim is UNRESOLVED:
                report.unresolved.append((p.id, f"branch {branch}: no limit within max_time"))
            elif lim != p.id and index_of[lim] == p.index:
                report.violations.append(
                    (p.id, lim, f"saddle-saddle flow line along branch {branch}"))
    return report
