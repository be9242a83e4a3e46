"""Reference triangulations shipped with the package.

``python3 -m morsewitten.meshes [DIR]`` regenerates the OFF assets and the
per-scenario value files.
"""

import itertools
import sys
from pathlib import Path

import numpy as np

from .simplicial import SimplicialComplex, to_off


def tetrahedron() -> SimplicialComplex:
    pos = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], float) / np.sqrt(3)
    return SimplicialComplex.from_triangles(itertools.combinations(range(4), 3), 4, pos)


def _rotation(a, b, c):
    def rot(i, j, t):
        R = np.eye(3)
        R[i, i] = R[j, j] = np.cos(t)
        R[i, j], R[j, i] = -np.sin(t), np.sin(t)
        return R
    return rot(0, 1, a) @ rot(1, 2, b) @ rot(0, 1, c)


def icosphere(level=3, angles=(0.3, 0.7, 0.2)) -> SimplicialComplex:
    """Subdivided icosahedron on the unit sphere, rotated so heights are distinct."""
    t = (1 + 5 ** 0.5) / 2
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0), (0, -1, t), (0, 1, t),
             (0, -1, -t), (0, 1, -t), (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
             (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
             (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    pos = [np.array(v, float) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        mid = {}

        def m(a, b):
            key = (min(a, b), max(a, b))
            if key not in mid:
                p = pos[a] + pos[b]
                pos.append(p / np.linalg.norm(p))
                mid[key] = len(pos) - 1
            return mid[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = m(a, b), m(b, c), m(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    P = np.array(pos) @ _rotation(*angles).T
    return SimplicialComplex.from_triangles(faces, len(P), P)


def torus7() -> SimplicialComplex:
    """Minimal 7-vertex torus (Moebius-Csaszar)."""
    tris = [(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)]
    tris += [(i, (i + 2) % 7, (i + 3) % 7) for i in range(7)]
    return SimplicialComplex.from_triangles(tris, 7)


def torus_grid(n=48, m=24, R=2.0, r=1.0, offsets=(0.31, 0.17)) -> SimplicialComplex:
    """Grid triangulation of the torus with axis along x.

    The point at angles ``(u, v)`` is ``(r sin v, (R + r cos v) cos u,
    (R + r cos v) sin u)``; the offsets keep vertices off the critical points.
    """
    us = 2 * np.pi * (np.arange(n) + offsets[0]) / n
    vs = 2 * np.pi * (np.arange(m) + offsets[1]) / m
    pos = np.array([[r * np.sin(v), (R + r * np.cos(v)) * np.cos(u), (R + r * np.cos(v)) * np.sin(u)]
                    for u in us for v in vs])
    idx = lambda i, j: (i % n) * m + (j % m)
    tris = []
    for i in range(n):
        for j in range(m):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            tris += [(a, b, c), (a, c, d)]
    return SimplicialComplex.from_triangles(tris, n * m, pos)


def projective_plane() -> SimplicialComplex:
    """Minimal 6-vertex triangulation of RP^2."""
    tris = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
            (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    return SimplicialComplex.from_triangles(tris, 6)


MESHES = {
    "tetrahedron": tetrahedron,
    "icosphere": icosphere,
    "torus7": torus7,
    "torus_grid": torus_grid,
    "rp2": projective_plane,
}


def write_assets(directory):
    from .scenarios import SCENARIOS

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, make in MESHES.items():
        (directory / f"{name}.off").write_text(to_off(make()))
    for sc in SCENARIOS.values():
        if sc.values_asset is None:
            continue
        mesh = MESHES[sc.mesh_asset]()
        field = sc.make_field()
        vals = [field.value(p) for p in mesh.positions]
        (directory / sc.values_asset).write_text("".join(f"{v:.15g}\n" for v in vals))


if __name__ == "__main__":
    write_assets(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "assets")
