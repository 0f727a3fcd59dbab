"""Dirichlet-Laplace solvers.

``singular_source`` represents the harmonic extension of boundary data as a
calibrated single-layer potential whose density is the second tangential
derivative of the data. ``classical_bem`` is a Nystrom boundary-element
reference, and ``oracles`` holds the closed-form disk and sphere solutions
both are checked against.
"""

from .boundary_calculus import (
    BoundaryField,
    SphericalHarmonicField,
    TrigSeries,
    second_tangential_derivative_fd,
    second_tangential_derivative_spectral,
    tangential_laplacian_sphere,
    zero_mean_check,
)
from .geometry import (
    BoundaryMesh,
    GridSpec,
    ParametricCurve,
    RegionLabel,
    SphereQuadrature,
    classify_point,
    make_circle,
    make_fourier_curve,
    make_sphere_quadrature,
    mesh_curve,
)
from .kernels import KernelConvention
from .singular_source import DegenerateCalibrationError, SingularSourceSolution, evaluate, solve

__version__ = "0.1.0"

__all__ = [
    "BoundaryField",
    "BoundaryMesh",
    "DegenerateCalibrationError",
    "GridSpec",
    "KernelConvention",
    "ParametricCurve",
    "RegionLabel",
    "SingularSourceSolution",
    "SphereQuadrature",
    "SphericalHarmonicField",
    "TrigSeries",
    "classify_point",
    "evaluate",
    "make_circle",
    "make_fourier_curve",
    "make_sphere_quadrature",
    "mesh_curve",
    "second_tangential_derivative_fd",
    "second_tangential_derivative_spectral",
    "solve",
    "tangential_laplacian_sphere",
    "zero_mean_check",
]
