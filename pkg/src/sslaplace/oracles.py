"""Closed-form reference solutions on the unit disk and the unit sphere.

The single-layer identities here are what predict the calibration
constants: on the unit circle the potential of density sin(k t) is
-rho^k sin(k t) / (2k) inside, and the density of f = sin(k t) is
-k^2 sin(k t), so the fitted scale must be C1 = 2/k. On the unit sphere the
potential of Y_lm is -r^l Y_lm / (2l + 1), giving C1 = (2l + 1) / (l (l + 1)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary_calculus import TrigSeries, real_sph_harm


@dataclass(frozen=True)
class DiskPoint:
    rho: float
    theta: float

    @classmethod
    def from_xy(cls, x: float, y: float) -> "DiskPoint":
        return cls(float(np.hypot(x, y)), float(np.arctan2(y, x)))

    def xy(self) -> tuple[float, float]:
        return self.rho * np.cos(self.theta), self.rho * np.sin(self.theta)


def poisson_kernel_disk(f: TrigSeries, z: DiskPoint, n_quad: int = 1024) -> float:
    """Trapezoid rule for u(z) = 1/(2 pi) int f(e^{it}) (1 - |z|^2) / |z - e^{it}|^2 dt.

    The rule converges like rho^n_quad; the default keeps the error below
    1e-20 over the allowed range rho <= 0.95.
    """
    if z.rho > 0.95:
        raise ValueError(f"Poisson-kernel quadrature needs rho <= 0.95, got {z.rho}")
    if n_quad < 64:
        raise ValueError(f"n_quad must be >= 64, got {n_quad}")
    t = 2.0 * np.pi * np.arange(n_quad) / n_quad
    x, y = z.xy()
    dist2 = (x - np.cos(t)) ** 2 + (y - np.sin(t)) ** 2
    kernel = (1.0 - z.rho**2) / dist2
    return float(np.mean(f(t) * kernel))


def disk_harmonic_mode(k: int, kind: str, z: DiskPoint) -> float:
    if k < 0:
        raise ValueError(f"mode index must be >= 0, got {k}")
    trig = np.cos if kind == "cos" else np.sin
    return float(z.rho**k * trig(k * z.theta))


def disk_single_layer_mode(k: int, kind: str, z: DiskPoint) -> float:
    """Interior single-layer potential of density cos/sin(k t) on the unit circle (lap G = delta)."""
    if k < 1:
        raise ValueError("k = 0 single layer grows logarithmically and is excluded")
    if z.rho >= 1.0:
        raise ValueError(f"interior identity needs rho < 1, got {z.rho}")
    return -disk_harmonic_mode(k, kind, z) / (2.0 * k)


def disk_extension(f: TrigSeries, points, radius: float = 1.0, center=(0.0, 0.0)) -> np.ndarray:
    """Harmonic extension of a trig series given on a circle, evaluated at (M, 2) points."""
    p = np.atleast_2d(np.asarray(points, dtype=float)) - np.asarray(center, dtype=float)
    rho = np.hypot(p[:, 0], p[:, 1]) / radius
    theta = np.arctan2(p[:, 1], p[:, 0])
    out = np.full(len(p), f.a0)
    for k, a, b in f.terms:
        out += rho**k * (a * np.cos(k * theta) + b * np.sin(k * theta))
    return out


def disk_neumann_data(f: TrigSeries, theta, radius: float = 1.0) -> np.ndarray:
    """Outward normal derivative of the harmonic extension on the circle."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros_like(theta)
    for k, a, b in f.terms:
        out += k / radius * (a * np.cos(k * theta) + b * np.sin(k * theta))
    return out


def predicted_c1_disk(k: int, radius: float = 1.0) -> float:
    return 2.0 * radius / k


def sphere_harmonic_extension(l: int, m: int, r) -> float:
    r = np.asarray(r, dtype=float)
    rad = float(np.linalg.norm(r))
    if rad >= 1.0:
        raise ValueError(f"interior extension needs |r| < 1, got {rad}")
    if rad == 0.0:
        return float(real_sph_harm(0, 0, [0, 0, 1])[0]) if l == 0 else 0.0
    return float(rad**l * real_sph_harm(l, m, r)[0])


def sphere_single_layer_mode(l: int, m: int, r) -> float:
    """Interior single-layer potential of density Y_lm on the unit sphere, G = -1/(4 pi |r - r'|)."""
    return -sphere_harmonic_extension(l, m, r) / (2 * l + 1)


def predicted_c1_sphere(l: int) -> float:
    if l < 1:
        raise ValueError("l = 0 has zero density; no calibration constant")
    return (2 * l + 1) / (l * (l + 1))
