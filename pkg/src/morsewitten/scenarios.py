"""Named scenarios: a surface, a Morse function, a reference mesh and golden homology."""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np

from .config import DEFAULT, Config
from .errors import UnknownScenario
from .geometry import ImplicitSurface, ScalarField, height, quadratic_field, sphere, torus
from .homology import HomologyProfile
from .simplicial import SimplicialComplex, read_mesh


def asset_dir() -> Path:
    env = os.environ.get("MORSE_ASSET_DIR")
    return Path(env) if env else Path(__file__).parent / "assets"


def _two_peak():
    return quadratic_field([0.0, 0.0, 1.0], np.diag([1.0, 0.0, 0.0]), name="z+x^2")


def _vertical_torus():
    return torus(2.0, 1.0, axis=0)


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    mesh_asset: str
    expected: HomologyProfile
    make_surface: Optional[Callable[[], ImplicitSurface]] = None
    make_field: Optional[Callable[[], ScalarField]] = None
    values_asset: Optional[str] = None
    overrides: Dict[str, object] = field(default_factory=dict)
    expect_clean: bool = True

    @property
    def mesh_only(self) -> bool:
        return self.make_surface is None

    def config(self, base: Config = DEFAULT) -> Config:
        return base.with_(**self.overrides) if self.overrides else base

    def mesh(self, with_values=True) -> SimplicialComplex:
        d = asset_dir()
        values = d / self.values_asset if (with_values and self.values_asset) else None
        return read_mesh(d / f"{self.mesh_asset}.off", values)


_SPHERE = HomologyProfile.from_betti((1, 0, 1))
_TORUS = HomologyProfile.from_betti((1, 2, 1))

SCENARIOS: Dict[str, Scenario] = {s.name: s for s in [
    Scenario("round_sphere", "unit sphere, f = z", "icosphere", _SPHERE,
             sphere, lambda: height(), "round_sphere.values"),
    Scenario("two_peak_sphere", "unit sphere, f = z + x^2", "icosphere", _SPHERE,
             sphere, _two_peak, "two_peak_sphere.values"),
    Scenario("tilted_torus", "torus with horizontal axis, f = z + 0.05 x", "torus_grid", _TORUS,
             _vertical_torus, lambda: height(eps_x=0.05), "tilted_torus.values"),
    Scenario("untilted_torus", "torus with horizontal axis, f = z (not Morse-Smale)",
             "torus_grid", _TORUS, _vertical_torus, lambda: height(), "untilted_torus.values",
             expect_clean=False),
    Scenario("projective_plane", "minimal 6-vertex RP^2 (mesh only)", "rp2",
             HomologyProfile.from_betti((1, 0, 0), {1: (2,)})),
]}


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise UnknownScenario(name, sorted(SCENARIOS)) from None
