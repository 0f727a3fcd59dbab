"""Calibrated single-layer representation of the Dirichlet-Laplace solution.

The harmonic extension of boundary data f is approximated by

    psi(r) = C1 * S(r) + C2,   S(r) = sum_j d_j G(r, r_j) dsigma_j,

where d_j samples the second tangential derivative of f at the mesh nodes.
No boundary integral equation is solved; the two constants are fitted to f
at staggered collocation points (element endpoints on a curve, cell
centres between nodes on the sphere), either exactly at two points or by
least squares over all of them.

On the sphere the collocation potential uses singularity subtraction,
sum_j (d_j - d(x)) w_j / |x - r_j| + 4 pi d(x), since the plain product rule
is only first-order accurate at on-surface targets.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import qr, solve_triangular

from . import _sums
from .boundary_calculus import (
    BoundaryField,
    SphericalHarmonicField,
    TrigSeries,
    second_tangential_derivative_fd,
    second_tangential_derivative_spectral,
    tangential_laplacian_sphere,
)
from .geometry import (
    BoundaryMesh,
    FieldGrid,
    GridSpec,
    ParametricCurve,
    SphereQuadrature,
    classify_points,
    classify_points_sphere,
    mesh_curve,
)
from .kernels import INV_2PI, INV_4PI, KernelConvention

logger = logging.getLogger(__name__)

NODE_TOLERANCE = 1e-12
DEGENERATE_REMEDY = (
    "the single-layer potential does not vary across the calibration points "
    "(zero or constant density?); pick other collocation points or use least-squares calibration"
)


class DegenerateCalibrationError(ValueError):
    """The 2x2 (or least-squares) calibration system cannot determine C1."""


@dataclass(frozen=True)
class CalibrationReport:
    method: str
    rms_residual: float
    relative_residual: float
    n_points: int


@dataclass(frozen=True, eq=False)
class SingularSourceSolution:
    mesh: BoundaryMesh | SphereQuadrature
    density: BoundaryField
    C1: float
    C2: float
    convention: KernelConvention
    calibration_report: CalibrationReport

    def __post_init__(self):
        if len(self.density) != self.mesh.n:
            raise ValueError("density and mesh sizes differ")
        if not (np.isfinite(self.C1) and np.isfinite(self.C2)):
            raise ValueError(f"calibration constants must be finite, got C1={self.C1}, C2={self.C2}")


def default_convention(mesh) -> KernelConvention:
    return KernelConvention(mesh.dimension, 1)


def _density_values(density) -> np.ndarray:
    return np.asarray(getattr(density, "values", density), dtype=float)


def _bare_sum(mesh, density, points, convention, on_node="raise"):
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    charge = _density_values(density) * mesh.weights
    if mesh.dimension == 2:
        raw, mind = _sums.log_potential(pts, mesh.nodes, charge)
        vals = convention.sign * INV_2PI * raw
    else:
        raw, mind = _sums.inverse_distance_potential(pts, mesh.nodes, charge)
        vals = -convention.sign * INV_4PI * raw
    bad = mind <= NODE_TOLERANCE
    if bad.any():
        if on_node == "raise":
            raise ValueError(f"evaluation point coincides with a mesh node (distance {mind[bad].min():.3g})")
        vals[bad] = np.nan
    return vals[0] if single else vals


def single_layer_sum(mesh, density, r, convention: KernelConvention | None = None):
    """S(r) = sum_j density_j G(r, r_j) dsigma_j, summed in ascending node order.

    ``r`` may be a single point or an (M, dim) array of points.
    """
    conv = convention or default_convention(mesh)
    return _bare_sum(mesh, density, r, conv)


def collocation_potential(
    mesh,
    density,
    convention: KernelConvention | None = None,
    density_at_collocation=None,
) -> np.ndarray:
    """S at the staggered collocation points of ``mesh``.

    Sphere meshes need the density value at each collocation point for the
    singularity subtraction.
    """
    conv = convention or default_convention(mesh)
    points = mesh.collocation_points()
    if mesh.dimension == 2:
        return _bare_sum(mesh, density, points, conv)
    if density_at_collocation is None:
        raise ValueError("sphere collocation needs the density at the collocation points")
    sub = _sums.inverse_distance_subtracted(
        points, density_at_collocation, mesh.nodes, _density_values(density), mesh.weights
    )
    # integral of dA / |x - r'| over the unit sphere is 4 pi for |x| = 1
    return -conv.sign * INV_4PI * (sub + 4.0 * np.pi * np.asarray(density_at_collocation, dtype=float))


def _fit_two_point(s_a, s_b, f_a, f_b):
    scale = max(abs(s_a), abs(s_b), 1.0)
    if abs(s_a - s_b) < 1e-10 * scale:
        raise DegenerateCalibrationError(
            f"degenerate two-point calibration: S(r_a) = {s_a:.6g}, S(r_b) = {s_b:.6g}; " + DEGENERATE_REMEDY
        )
    c1 = (f_a - f_b) / (s_a - s_b)
    c2 = f_a - c1 * s_a
    return float(c1), float(c2)


def _fit_least_squares(s, f):
    s = np.asarray(s, dtype=float)
    f = np.asarray(f, dtype=float)
    if len(s) < 2 or len(s) != len(f):
        raise ValueError(f"least-squares calibration needs >= 2 matched points, got {len(s)} and {len(f)}")
    # column order [1, S]: R[1, 1] is the norm of S with its mean removed
    design = np.column_stack([np.ones_like(s), s])
    q, r = qr(design, mode="economic")
    scale = max(float(np.linalg.norm(s)), np.sqrt(len(s)))
    if abs(r[1, 1]) <= 1e-10 * scale:
        raise DegenerateCalibrationError("degenerate least-squares calibration: " + DEGENERATE_REMEDY)
    c2, c1 = solve_triangular(r, q.T @ f)
    misfit = c1 * s + c2 - f
    rms = float(np.sqrt(np.mean(misfit**2)))
    return float(c1), float(c2), rms


def _relative(rms, f):
    norm = float(np.sqrt(np.mean(np.asarray(f, dtype=float) ** 2)))
    return rms / norm if norm > 0 else float("inf") if rms > 0 else 0.0


def calibrate_two_point(
    mesh,
    density,
    f,
    a: int,
    b: int,
    convention: KernelConvention | None = None,
    density_at_collocation=None,
) -> tuple[float, float]:
    """Solve f(r_a) = C1 S(r_a) + C2, f(r_b) = C1 S(r_b) + C2.

    ``f`` holds boundary values at the collocation points; ``a`` and ``b``
    index into them.
    """
    if a == b:
        raise ValueError("two-point calibration needs two distinct collocation points")
    f = np.asarray(f, dtype=float)
    s = collocation_potential(mesh, density, convention, density_at_collocation)
    return _fit_two_point(s[a], s[b], f[a], f[b])


def calibrate_least_squares(
    mesh,
    density,
    f,
    convention: KernelConvention | None = None,
    density_at_collocation=None,
) -> tuple[float, float, float]:
    """Least-squares C1, C2 over all collocation points; returns (C1, C2, rms misfit)."""
    s = collocation_potential(mesh, density, convention, density_at_collocation)
    return _fit_least_squares(s, f)


def _half_shift(values: np.ndarray) -> np.ndarray:
    """Trigonometric interpolation of node samples onto element endpoints."""
    n = len(values)
    spec = np.fft.rfft(values)
    k = np.arange(len(spec))
    shifted = spec * np.exp(-1j * k * np.pi / n)
    if n % 2 == 0:
        # the Nyquist mode sampled at half steps is identically zero
        shifted[-1] = 0.0
    return np.fft.irfft(shifted, n)


def solve(
    mesh,
    boundary,
    calibration: str = "least_squares",
    pair: Sequence[int] | None = None,
    density_route: str = "spectral",
    convention: KernelConvention | None = None,
) -> SingularSourceSolution:
    """Build the density, calibrate, and return an evaluable solution.

    ``boundary`` is a ``TrigSeries`` (curves), a ``SphericalHarmonicField``
    (sphere), or a ``BoundaryField`` of node samples, which forces the
    finite-difference density and trigonometric interpolation of f onto the
    collocation points.
    """
    conv = convention or default_convention(mesh)
    dens_colloc = None
    if isinstance(mesh, SphereQuadrature):
        if not isinstance(boundary, SphericalHarmonicField):
            raise TypeError("sphere problems take a SphericalHarmonicField")
        density = tangential_laplacian_sphere(boundary, mesh)
        points = mesh.collocation_points()
        f_colloc = boundary(points)
        dens_colloc = boundary.laplace_beltrami(points)
    elif isinstance(boundary, TrigSeries):
        if density_route == "spectral":
            density = second_tangential_derivative_spectral(boundary, mesh)
        elif density_route in ("fd", "finite_difference"):
            density = second_tangential_derivative_fd(BoundaryField(boundary(mesh.parameter_values), mesh))
        else:
            raise ValueError(f"unknown density route {density_route!r}")
        f_colloc = boundary(mesh.collocation_parameters())
    elif isinstance(boundary, BoundaryField):
        density = second_tangential_derivative_fd(boundary)
        f_colloc = _half_shift(boundary.values)
    else:
        raise TypeError(f"unsupported boundary data {type(boundary).__name__}")

    s = collocation_potential(mesh, density, conv, dens_colloc)
    if calibration == "two_point":
        if pair is None or len(pair) != 2:
            raise ValueError("two-point calibration needs a pair of collocation indices")
        a, b = (int(i) for i in pair)
        if a == b:
            raise ValueError("two-point calibration needs two distinct collocation points")
        c1, c2 = _fit_two_point(s[a], s[b], f_colloc[a], f_colloc[b])
        rms = float(np.sqrt(np.mean((c1 * s + c2 - f_colloc) ** 2)))
    elif calibration == "least_squares":
        c1, c2, rms = _fit_least_squares(s, f_colloc)
    else:
        raise ValueError(f"unknown calibration mode {calibration!r}")
    report = CalibrationReport(calibration, rms, _relative(rms, f_colloc), len(s))
    logger.debug("calibrated C1=%.6g C2=%.6g (%s, rms %.3g)", c1, c2, calibration, rms)
    return SingularSourceSolution(mesh, density, c1, c2, conv, report)


def evaluate(sol: SingularSourceSolution, r):
    """C1 S(r) + C2 at a point or an (M, dim) array; defined inside and outside."""
    s = _bare_sum(sol.mesh, sol.density, r, sol.convention)
    return sol.C1 * s + sol.C2


@dataclass(frozen=True)
class ScanRow:
    k: int
    C1: float
    C2: float
    rms_residual: float
    predicted_C1: float | None


def calibration_scan(
    curve: ParametricCurve,
    modes: Sequence[int],
    n: int,
    calibration: str = "least_squares",
    convention: KernelConvention | None = None,
) -> list[ScanRow]:
    """Fit C1, C2 separately for f = sin(k t), one row per mode.

    A single constant C1 would show up as a flat C1 column; on a circle of
    radius R the single-layer identity predicts C1 = 2R/k instead.
    """
    if not modes:
        raise ValueError("calibration scan needs at least one mode")
    mesh = mesh_curve(curve, n)
    rows = []
    for k in modes:
        if int(k) != k or k < 1:
            raise ValueError(f"scan modes must be integers >= 1, got {k}")
        sol = solve(mesh, TrigSeries.mode(int(k), "sin"), calibration, convention=convention)
        predicted = 2.0 * curve.radius / k if curve.kind == "circle" else None
        rows.append(ScanRow(int(k), sol.C1, sol.C2, sol.calibration_report.rms_residual, predicted))
    return rows


def evaluate_grid(sol: SingularSourceSolution, spec: GridSpec, delta: float | None = None) -> FieldGrid:
    """Evaluate on a rectangular grid with region labels.

    Near-boundary points keep their values but are flagged; grid points that
    land exactly on a node get NaN.
    """
    delta = sol.mesh.default_delta() if delta is None else delta
    if sol.mesh.dimension == 2:
        points = spec.points2d()
        labels = classify_points(sol.mesh.source_curve, points, delta)
    else:
        points = spec.points3d()
        labels = classify_points_sphere(points, delta)
    values = sol.C1 * _bare_sum(sol.mesh, sol.density, points, sol.convention, on_node="nan") + sol.C2
    return FieldGrid(spec, points, labels, delta, {"ss": values})
