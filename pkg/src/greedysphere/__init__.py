"""Greedy energy point sequences on spheres and their asymptotic diagnostics."""

__version__ = "0.1.0"

from .kernels import (
    KernelSpec,
    WienerConstant,
    ZetaCoeffs,
    incomplete_beta,
    log_cap_mean,
    riesz_kernel,
    riesz_laplace_beltrami,
    sinc_power_coeffs,
    wiener_constant,
    zeta,
)
from .greenfn import (
    GreenSeriesError,
    green_cap_mean,
    green_cap_mean_shift,
    green_kernel,
)
from .sphere import (
    Cap,
    PartitionRegion,
    candidate_mesh,
    cap_measure,
    equal_area_partition,
    geodesic_distance,
    separation,
)
from .optimize import MinResult, SolverParams, minimize_potential, potential, potential_gradient
from .greedy import Configuration, build_sequence, energy, extend_sequence, polarization

__all__ = [
    "Cap",
    "Configuration",
    "GreenSeriesError",
    "KernelSpec",
    "MinResult",
    "PartitionRegion",
    "SolverParams",
    "WienerConstant",
    "ZetaCoeffs",
    "build_sequence",
    "candidate_mesh",
    "cap_measure",
    "energy",
    "equal_area_partition",
    "extend_sequence",
    "geodesic_distance",
    "green_cap_mean",
    "green_cap_mean_shift",
    "green_kernel",
    "incomplete_beta",
    "log_cap_mean",
    "minimize_potential",
    "polarization",
    "potential",
    "potential_gradient",
    "riesz_kernel",
    "riesz_laplace_beltrami",
    "separation",
    "sinc_power_coeffs",
    "wiener_constant",
    "zeta",
]
