"""Nystrom boundary-element reference solver for the interior Dirichlet problem.

With lap G = s * delta (s = +1 for the default convention), Green's third
identity gives, for x inside,

    phi(x) = s * integral [ f dG/dn' - G q ] dsigma',

and on a smooth boundary the same identity with phi(x) / 2 on the left.
Unknown Neumann data q = d phi / dn solve the first-kind system

    S q = D f - (s / 2) f.

Off-diagonal entries are point evaluations at the mesh nodes. The single
layer self-term is either the corrected periodic-trapezoid weight (default)
or the flat-element integral; the double-layer self-term is its
smooth-curve limit s * kappa / (4 pi) * dsigma.

On the unit circle (logarithmic capacity 1) S annihilates constants. The
system is augmented with the zero-flux row sum_j q_j dsigma_j = 0 and solved
in the least-squares sense through a QR factorization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr, solve_triangular

from .boundary_calculus import BoundaryField
from .geometry import BoundaryMesh, RegionLabel, classify_points
from .kernels import (
    INV_4PI,
    KernelConvention,
    PLANE,
    diagonal_log_self_weight,
    dnormal_matrix,
    green_matrix,
    periodic_log_self_weight,
)

SELF_TERMS = ("corrected", "flat")


class BemSolverError(RuntimeError):
    """The augmented boundary system is numerically rank deficient."""


@dataclass(frozen=True, eq=False)
class BemSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    constraint_row: np.ndarray
    mesh: BoundaryMesh
    convention: KernelConvention


@dataclass(frozen=True, eq=False)
class NeumannData:
    q: BoundaryField

    @property
    def flux(self) -> float:
        return float(np.dot(self.q.values, self.q.mesh.weights))


def _values(f) -> np.ndarray:
    return np.asarray(getattr(f, "values", f), dtype=float)


def single_layer_matrix(mesh: BoundaryMesh, convention=PLANE, self_term: str = "corrected") -> np.ndarray:
    if self_term not in SELF_TERMS:
        raise ValueError(f"self_term must be one of {SELF_TERMS}, got {self_term!r}")
    x = mesh.nodes
    n = mesh.n
    d = x[:, None, :] - x[None, :, :]
    dist = np.sqrt((d * d).sum(axis=-1))
    np.fill_diagonal(dist, 1.0)
    mat = convention.sign * np.log(dist) / (2.0 * np.pi) * mesh.weights[None, :]
    if self_term == "corrected":
        diag = [periodic_log_self_weight(w) for w in mesh.weights]
    else:
        diag = [diagonal_log_self_weight(w) for w in mesh.weights]
    mat[np.arange(n), np.arange(n)] = convention.sign * np.asarray(diag)
    return mat


def double_layer_matrix(mesh: BoundaryMesh, convention=PLANE) -> np.ndarray:
    x = mesh.nodes
    n = mesh.n
    d = x[None, :, :] - x[:, None, :]
    dist2 = (d * d).sum(axis=-1)
    np.fill_diagonal(dist2, 1.0)
    proj = (d * mesh.normals[None, :, :]).sum(axis=-1)
    mat = convention.sign * proj / (2.0 * np.pi * dist2) * mesh.weights[None, :]
    mat[np.arange(n), np.arange(n)] = convention.sign * mesh.curvature * INV_4PI * mesh.weights
    return mat


def assemble(mesh: BoundaryMesh, f, convention: KernelConvention = PLANE, self_term: str = "corrected") -> BemSystem:
    if mesh.n < 16:
        raise ValueError(f"BEM assembly needs N >= 16, got {mesh.n}")
    fv = _values(f)
    smat = single_layer_matrix(mesh, convention, self_term)
    dmat = double_layer_matrix(mesh, convention)
    rhs = dmat @ fv - 0.5 * convention.sign * fv
    return BemSystem(smat, rhs, mesh.weights.copy(), mesh, convention)


def solve_neumann(system: BemSystem) -> NeumannData:
    """Least-squares solve of the N x N system plus the zero-flux row."""
    a = np.vstack([system.matrix, system.constraint_row[None, :]])
    b = np.append(system.rhs, 0.0)
    q, r = qr(a, mode="economic")
    diag = np.abs(np.diag(r))
    if diag.min() <= len(b) * np.finfo(float).eps * diag.max():
        raise BemSolverError(
            "boundary system is numerically rank deficient (degenerate mesh?); "
            "rescaling the domain away from unit logarithmic capacity usually helps"
        )
    sol = solve_triangular(r, q.T @ b)
    return NeumannData(BoundaryField(sol, system.mesh))


def solve_dirichlet(mesh: BoundaryMesh, f, convention: KernelConvention = PLANE, self_term: str = "corrected") -> NeumannData:
    return solve_neumann(assemble(mesh, f, convention, self_term))


def evaluate_interior(
    mesh: BoundaryMesh,
    f,
    q,
    r,
    convention: KernelConvention = PLANE,
    delta: float | None = None,
    check: bool = True,
):
    """phi(r) = s * sum_j [f_j dG/dn'(r, r_j) - G(r, r_j) q_j] dsigma_j.

    Rejects points that are outside or within ``delta`` of the boundary.
    """
    pts = np.asarray(r, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if check:
        delta = mesh.default_delta() if delta is None else delta
        labels = classify_points(mesh.source_curve, pts, delta)
        bad = [k for k, lab in enumerate(labels) if lab is not RegionLabel.INSIDE]
        if bad:
            raise ValueError(
                f"interior representation is only valid strictly inside; point {pts[bad[0]].tolist()} "
                f"is {labels[bad[0]].value}"
            )
    fv, qv = _values(f), _values(q)
    out = np.empty(len(pts))
    for lo in range(0, len(pts), 256):
        p = pts[lo:lo + 256]
        g = green_matrix(convention, p, mesh.nodes)
        dg = dnormal_matrix(convention, p, mesh.nodes, mesh.normals)
        out[lo:lo + 256] = convention.sign * ((dg * fv[None, :] - g * qv[None, :]) @ mesh.weights)
    return out[0] if single else out
