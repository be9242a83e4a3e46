"""Morse-Witten complexes of Morse functions on implicit surfaces.

The engine locates critical points, enumerates signed gradient flow lines,
assembles the chain complex and computes its integer homology, which is
compared against simplicial homology of a reference triangulation.
"""

from .config import DEFAULT, Config
from .errors import (
    AmbiguousCluster,
    BlowUp,
    DegenerateCritical,
    DegenerateFrame,
    IndexGap,
    MorseError,
    NonConvergence,
    NonManifoldWarning,
    NotAComplex,
    NotCritical,
    OffSurface,
    ParseError,
    SeedExhaustion,
    ThresholdOnCriticalValue,
    UnknownScenario,
)
from .geometry import (
    ImplicitSurface,
    ScalarField,
    TangentFrame,
    height,
    project_to_surface,
    quadratic_field,
    restricted_hessian,
    riemannian_gradient,
    sphere,
    tangent_frame,
    torus,
)
from .critical import CriticalPoint, find_critical_points, morse_index
from .flow import (
    Connection,
    Trajectory,
    check_morse_smale,
    connection_sign,
    enumerate_connections,
    integrate_flow,
    unstable_seeds,
)
from .complex import MorseComplex, boundary_matrix, build_morse_complex, verify_chain_complex
from .homology import HomologyProfile, SNFResult, homology_of_complex, smith_normal_form

__version__ = "0.1.0"
