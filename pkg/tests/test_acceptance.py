"""End-to-end acceptance checks, one test (or parametrized family) per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary; running
this file directly (``python3 tests/test_acceptance.py``) does the same.
"""

import numpy as np
import pytest
import sympy

from conftest import scenario_setup, timed_run
from morsewitten.complex import all_connections
from morsewitten.config import DEFAULT
from morsewitten.critical import euler_characteristic
from morsewitten.flow import integrate_flow
from morsewitten.geometry import project_to_surface, riemannian_gradient, tangent_frame
from morsewitten.homology import HomologyProfile, smith_normal_form
from morsewitten.scenarios import get_scenario
from morsewitten.simplicial import simplicial_homology, sublevel_filtration_check

MORSE = ["round_sphere", "two_peak_sphere", "tilted_torus"]
SPHERE = HomologyProfile.from_betti((1, 0, 1))
TORUS = HomologyProfile.from_betti((1, 2, 1))
GOLDEN = {"round_sphere": SPHERE, "two_peak_sphere": SPHERE, "tilted_torus": TORUS}


def _profile(d):
    return HomologyProfile.from_betti([g["betti"] for g in d],
                                      {g["degree"]: tuple(g["torsion"]) for g in d})


@pytest.mark.parametrize("name", MORSE)
def test_criterion_1_chain_complex(name):
    report, seconds = timed_run(name)
    assert report.payload["chain_complex"] is True
    assert report.payload["failing_degree"] is None
    assert seconds < 60.0, f"{name} took {seconds:.1f}s"


@pytest.mark.parametrize("name", MORSE)
def test_criterion_2_morse_equals_simplicial(name):
    report, _ = timed_run(name)
    morse = _profile(report.payload["morse_homology"])
    simp = _profile(report.payload["simplicial_homology"])
    assert morse == simp
    assert morse == GOLDEN[name]
    assert report.match


def _counts(name, cfg):
    surface, field, cps = scenario_setup(name)
    conns = all_connections(surface, field, cps, cfg)
    return {k: (len(v), sum(c.sign for c in v)) for k, v in conns.items()}


@pytest.mark.parametrize("name", ["two_peak_sphere", "tilted_torus"])
def test_criterion_3_connection_counts_stable(name):
    base = _counts(name, DEFAULT)
    doubled = _counts(name, DEFAULT.with_(seeds=128))
    lower = _counts(name, DEFAULT.with_(level_fraction=0.3))
    upper = _counts(name, DEFAULT.with_(level_fraction=0.7))
    for other in (doubled, lower, upper):
        assert {k: c for k, (c, _) in other.items()} == {k: c for k, (c, _) in base.items()}
    if name == "two_peak_sphere":
        _, _, cps = scenario_setup(name)
        index = {c.id: c.index for c in cps}
        for (p, q), (count, n) in base.items():
            if index[p] == 2:
                assert count == 1
            else:
                assert (count, n) == (2, 0)


@pytest.mark.parametrize("name,chi", [("round_sphere", 2), ("two_peak_sphere", 2),
                                      ("tilted_torus", 0)])
def test_criterion_4_euler_characteristic(name, chi):
    _, _, cps = scenario_setup(name)
    mesh = get_scenario(name).mesh(with_values=False)
    assert euler_characteristic(cps) == mesh.euler_characteristic == chi


@pytest.mark.parametrize("name", MORSE)
def test_criterion_5_filtration_ranks(name):
    _, _, cps = scenario_setup(name)
    mesh = get_scenario(name).mesh()
    report = sublevel_filtration_check(mesh, [(c.value, c.index) for c in cps])
    assert report.passed, report.as_dict()
    total = np.sum([s.observed for s in report.steps], axis=0)
    counts = [sum(1 for c in cps if c.index == k) for k in range(3)]
    assert total.tolist() == counts


def test_criterion_6_projective_plane_torsion():
    prof = simplicial_homology(get_scenario("projective_plane").mesh())
    assert prof.groups[1].betti == 0
    assert prof.groups[1].torsion == (2,)
    assert prof == HomologyProfile.from_betti((1, 0, 0), {1: (2,)})


def test_criterion_7_morse_smale_diagnostic():
    untilted, _ = timed_run("untilted_torus")
    viol = untilted.payload["morse_smale"]["violations"]
    idx = {c["id"]: c["index"] for c in untilted.payload["critical_points"]}
    assert viol and all(idx[v["source"]] == idx[v["target"]] == 1 for v in viol)
    tilted, _ = timed_run("tilted_torus")
    assert tilted.payload["morse_smale"]["clean"]


def _random_surface_points(surface, n, rng):
    pts = []
    box = np.array(surface.bounding_box)
    while len(pts) < n:
        x = box[:, 0] + rng.random(3) * (box[:, 1] - box[:, 0])
        try:
            pts.append(project_to_surface(x, surface))
        except Exception:
            continue
    return pts


def _fd_grad(fun, x, h=1e-6):
    return np.array([(fun(x + h * e) - fun(x - h * e)) / (2 * h) for e in np.eye(3)])


@pytest.mark.parametrize("name", MORSE)
def test_criterion_8_numerical_hygiene(name):
    surface, field, cps = scenario_setup(name)
    rng = np.random.default_rng(8)
    worst = 0.0
    for x in _random_surface_points(surface, 1000, rng):
        for fun, grad in ((field.value, field.gradient),
                          (surface.constraint, surface.constraint_gradient)):
            g = grad(x)
            worst = max(worst, np.linalg.norm(_fd_grad(fun, x) - g) / max(np.linalg.norm(g), 1e-12))
        # tangential derivative of f along the surface versus the restricted gradient
        rg = riemannian_gradient(surface, field, x)
        for e in tangent_frame(surface, x).vectors():
            h = 1e-6
            fp = field.value(project_to_surface(x + h * e, surface))
            fm = field.value(project_to_surface(x - h * e, surface))
            assert abs((fp - fm) / (2 * h) - rg @ e) <= 1e-5 * max(np.linalg.norm(rg), 1.0)
    assert worst <= 1e-5

    report, _ = timed_run(name)
    trajs = [c.representative for c in report.connections]
    trajs += [integrate_flow(surface, field, x, cps)
              for x in _random_surface_points(surface, 10, rng)]
    drift = max(abs(surface.constraint(p)) for t in trajs for p in t.points)
    assert drift <= 1e-8


def test_criterion_9_snf_soundness():
    rng = np.random.default_rng(9)
    for _ in range(500):
        m, n = rng.integers(1, 9, size=2)
        A = rng.integers(-9, 10, size=(m, n))
        res = smith_normal_form(A)
        assert (res.U.dot(A.astype(object)).dot(res.V) == res.S).all()
        assert abs(sympy.Matrix(res.U.tolist()).det()) == 1
        assert abs(sympy.Matrix(res.V.tolist()).det()) == 1
        d = res.invariant_factors
        assert all(x > 0 for x in d)
        assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))
        off = res.S.copy()
        for i in range(min(m, n)):
            off[i, i] = 0
        assert not off.any()


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
