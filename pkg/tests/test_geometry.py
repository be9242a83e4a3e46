import pickle

import numpy as np
import pytest

from morsewitten.errors import NonConvergence, NotCritical, OffSurface
from morsewitten.geometry import (
    height,
    negative_gradient_field,
    project_to_surface,
    quadratic_field,
    restricted_hessian,
    riemannian_gradient,
    sphere,
    tangent_frame,
    TangentFrame,
    torus,
)


def test_project_examples():
    S = sphere()
    assert np.allclose(project_to_surface([0, 0, 2.0], S), [0, 0, 1])
    assert np.allclose(project_to_surface([1.0, 0, 0], S), [1, 0, 0])
    T = torus(2.0, 1.0, axis=2)
    assert np.allclose(project_to_surface([3.5, 0, 0], T), [3, 0, 0])


def test_project_outside_box_and_failure():
    with pytest.raises(OffSurface):
        project_to_surface([5.0, 0, 0], sphere())
    # the torus constraint gradient vanishes on the core circle
    with pytest.raises(NonConvergence):
        project_to_surface([2.0, 0, 0], torus(2.0, 1.0, axis=2))


def test_riemannian_gradient_examples():
    S, f = sphere(), height()
    assert np.allclose(riemannian_gradient(S, f, np.array([1.0, 0, 0])), [0, 0, 1])
    assert np.allclose(riemannian_gradient(S, f, np.array([0, 0, 1.0])), 0)
    x = np.array([0, np.sqrt(2) / 2, np.sqrt(2) / 2])
    assert np.allclose(riemannian_gradient(S, f, x), [0, -0.5, 0.5])
    with pytest.raises(OffSurface):
        riemannian_gradient(S, f, np.array([0, 0, 1.1]))


def _surface_points(S, n, rng):
    box = np.array(S.bounding_box)
    out = []
    while len(out) < n:
        try:
            out.append(project_to_surface(box[:, 0] + rng.random(3) * (box[:, 1] - box[:, 0]), S))
        except NonConvergence:
            pass
    return out


def test_gradient_is_tangent():
    rng = np.random.default_rng(1)
    for S, f in [(sphere(), quadratic_field([0.3, -1, 2], np.diag([1, 2, -1]))),
                 (torus(2, 1, axis=0), height(0.05))]:
        for x in _surface_points(S, 200, rng):
            g, n = riemannian_gradient(S, f, x), S.constraint_gradient(x)
            assert abs(g @ n) <= 1e-8 * max(1.0, np.linalg.norm(g) * np.linalg.norm(n))


def test_tangent_frame_right_handed():
    rng = np.random.default_rng(2)
    S = torus(2, 1, axis=0)
    for x in _surface_points(S, 100, rng):
        fr = tangent_frame(S, x)
        n = S.normal(x)
        M = np.array([n, fr.e1, fr.e2])
        assert np.allclose(M @ M.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(M) == pytest.approx(1.0)


def test_hessian_poles_of_height():
    S, f = sphere(), height()
    assert np.allclose(restricted_hessian(S, f, np.array([0, 0, 1.0])), -np.eye(2))
    assert np.allclose(restricted_hessian(S, f, np.array([0, 0, -1.0])), np.eye(2))


def _graph_hessian(h=1e-4):
    # f = z + x^2 on the upper hemisphere as a function of (x, y)
    g = lambda x, y: x * x + np.sqrt(1 - x * x - y * y)
    fxx = (g(h, 0) - 2 * g(0, 0) + g(-h, 0)) / h ** 2
    fyy = (g(0, h) - 2 * g(0, 0) + g(0, -h)) / h ** 2
    fxy = (g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4 * h * h)
    return np.array([[fxx, fxy], [fxy, fyy]])


def test_hessian_two_peak_north_pole_matches_graph_taylor():
    S = sphere()
    f = quadratic_field([0, 0, 1], np.diag([1, 0, 0]))
    x = np.array([0, 0, 1.0])
    frame = TangentFrame(x, np.array([1.0, 0, 0]), np.array([0, 1.0, 0]))
    H = restricted_hessian(S, f, x, frame)
    oracle = _graph_hessian()
    assert np.allclose(oracle, np.diag([1, -1]), atol=1e-6)
    assert np.allclose(H, oracle, atol=1e-6)
    assert H[0, 1] == H[1, 0]


def test_hessian_off_critical_raises():
    with pytest.raises(NotCritical):
        restricted_hessian(sphere(), height(), np.array([1.0, 0, 0]))


def test_negative_gradient_field_on_surface():
    S, f = sphere(), height()
    F = negative_gradient_field(S, f)
    x = np.array([0, np.sqrt(2) / 2, np.sqrt(2) / 2])
    assert np.allclose(F(x), -riemannian_gradient(S, f, x))


def test_surfaces_and_fields_pickle():
    S, f = torus(2, 1, axis=0), height(0.05)
    S2, f2 = pickle.loads(pickle.dumps((S, f)))
    x = np.array([0.3, 0.1, 2.5])
    assert S2.constraint(x) == S.constraint(x)
    assert f2.value(x) == f.value(x)


def test_torus_requires_r_less_than_R():
    with pytest.raises(ValueError):
        torus(1.0, 2.0)
