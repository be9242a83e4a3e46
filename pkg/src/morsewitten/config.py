"""Numerical tolerances shared by the engine."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    # geometry
    proj_tol: float = 1e-10
    crit_tol: float = 1e-8
    max_newton: int = 60

    # critical point search
    grid: int = 7
    dedup_radius: float = 1e-5
    nondegen_tol: float = 1e-6

    # flow integration
    step_tol: float = 1e-9
    max_time: float = 400.0
    max_steps: int = 200_000
    capture_radius: float = 1e-4
    limit_tol: float = 1e-6

    # connection enumeration
    seeds: int = 64
    seed_radius: float = 1e-3
    cluster_radius: float = 1e-3
    near_radius: float = 0.05
    level_fraction: float = 0.5

    jobs: int = 1

    def with_(self, **changes) -> "Config":
        return replace(self, **changes)


DEFAULT = Config()
