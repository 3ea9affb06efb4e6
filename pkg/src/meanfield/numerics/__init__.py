"""Verification machinery: seeded sampling, orbit hill climbing, LP feasibility."""
from .orbit import OrbitProblem, OrbitResult, f_functional, orbit_optimize, polarizations
from .rng import (
    SeededStream,
    haar_unitaries,
    random_fixed_spectrum,
    random_haar_pure,
    random_unitary,
)
from .polytope import enumerate_vertices
from .simplex import check_point, lp_feasible

__all__ = [
    "OrbitProblem",
    "OrbitResult",
    "SeededStream",
    "check_point",
    "enumerate_vertices",
    "f_functional",
    "haar_unitaries",
    "lp_feasible",
    "orbit_optimize",
    "polarizations",
    "random_fixed_spectrum",
    "random_haar_pure",
    "random_unitary",
]
