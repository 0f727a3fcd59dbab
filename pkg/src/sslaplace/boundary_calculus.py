"""Second tangential derivative of boundary data.

On a curve the singular-source density is the arc-length second derivative
d^2 f / ds^2 of the boundary function; on the unit sphere it is the
Laplace-Beltrami operator applied to f. Three routes are provided: exact
differentiation of a trigonometric series with the chain rule, cyclic
three-point differences of node samples, and per-mode scaling of a
spherical-harmonic expansion.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np
from scipy.special import lpmv

from .geometry import BoundaryMesh, SphereQuadrature

_PRESETS = {
    "constant": (1.0, ()),
    "sin2theta": (0.0, ((2, 0.0, 1.0),)),
    "cos_theta": (0.0, ((1, 1.0, 0.0),)),
    "sin_theta_plus_sin3theta": (0.0, ((1, 0.0, 1.0), (3, 0.0, 1.0))),
}


@dataclass(frozen=True)
class TrigSeries:
    """Boundary function f(t) = a0 + sum_k (a_k cos kt + b_k sin kt) in the curve parameter."""

    a0: float = 0.0
    terms: tuple[tuple[int, float, float], ...] = ()

    def __post_init__(self):
        for k, _, _ in self.terms:
            if int(k) != k or k < 1:
                raise ValueError(f"trig mode index must be an integer >= 1, got {k}")

    @classmethod
    def preset(cls, name: str) -> "TrigSeries":
        try:
            a0, terms = _PRESETS[name]
        except KeyError:
            raise ValueError(f"unknown boundary-function preset {name!r}; known: {sorted(_PRESETS)}") from None
        return cls(a0, terms)

    @classmethod
    def mode(cls, k: int, kind: str = "sin", amplitude: float = 1.0) -> "TrigSeries":
        if k == 0:
            return cls(amplitude if kind == "cos" else 0.0)
        if kind == "sin":
            return cls(0.0, ((k, 0.0, amplitude),))
        return cls(0.0, ((k, amplitude, 0.0),))

    @property
    def degree(self) -> int:
        return max((k for k, _, _ in self.terms), default=0)

    def scaled(self, alpha: float, beta: float = 0.0) -> "TrigSeries":
        return TrigSeries(alpha * self.a0 + beta, tuple((k, alpha * a, alpha * b) for k, a, b in self.terms))

    def __add__(self, other: "TrigSeries") -> "TrigSeries":
        return TrigSeries(self.a0 + other.a0, self.terms + other.terms)

    def __call__(self, t, order: int = 0):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.a0 if order == 0 else 0.0)
        for k, a, b in self.terms:
            c, s = np.cos(k * t), np.sin(k * t)
            if order == 0:
                out = out + a * c + b * s
            elif order == 1:
                out = out + k * (b * c - a * s)
            elif order == 2:
                out = out - k * k * (a * c + b * s)
            else:
                raise ValueError("only derivatives up to order 2 are available")
        return out


@dataclass(frozen=True, eq=False)
class BoundaryField:
    """Scalar samples aligned one-to-one with the nodes of ``mesh``."""

    values: np.ndarray
    mesh: BoundaryMesh | SphereQuadrature

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.mesh.n,):
            raise ValueError(f"field has {values.shape} samples, mesh has {self.mesh.n} nodes")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)


def sample(spec: TrigSeries, mesh: BoundaryMesh) -> BoundaryField:
    return BoundaryField(spec(mesh.parameter_values), mesh)


def _check_uniform(mesh: BoundaryMesh) -> None:
    t = mesh.parameter_values
    expected = 2.0 * np.pi * (np.arange(mesh.n) + 0.5) / mesh.n
    if len(t) != mesh.n or not np.allclose(t, expected, rtol=0.0, atol=1e-12):
        raise ValueError("density routes require nodes at uniform parameter spacing")


def second_tangential_derivative_spectral(spec: TrigSeries, mesh: BoundaryMesh) -> BoundaryField:
    """d^2 f/ds^2 = f_tt / |g'|^2 - f_t (g' . g'') / |g'|^4 at the mesh nodes."""
    _check_uniform(mesh)
    t = mesh.parameter_values
    curve = mesh.source_curve
    g1, g2 = curve.d1(t), curve.d2(t)
    speed2 = (g1 * g1).sum(axis=1)
    dot = (g1 * g2).sum(axis=1)
    values = spec(t, 2) / speed2 - spec(t, 1) * dot / speed2**2
    return BoundaryField(values, mesh)


def second_tangential_derivative_fd(samples: BoundaryField) -> BoundaryField:
    """Cyclic three-point second difference in arc length.

    Conservative form: differences over the arc steps to each neighbour,
    divided by the node's own element length. Reduces to
    (f+ - 2 f + f-) / ds^2 on uniform-speed curves and telescopes exactly,
    so the weighted sum of the result is zero to rounding.
    """
    mesh = samples.mesh
    _check_uniform(mesh)
    if mesh.n < 8:
        raise ValueError("finite-difference density needs N >= 8")
    f = samples.values
    w = mesh.weights
    # arc step from node j to node j+1 spans two half-elements
    step = 0.5 * (w + np.roll(w, -1))
    flux = (np.roll(f, -1) - f) / step
    values = (flux - np.roll(flux, 1)) / w
    return BoundaryField(values, mesh)


def zero_mean_check(density: BoundaryField) -> float:
    """Arc-length (or area) weighted integral of a boundary field."""
    return float(np.dot(density.values, density.mesh.weights))


# ---------------------------------------------------------------------------
# Unit sphere
# ---------------------------------------------------------------------------


def real_sph_harm(l: int, m: int, points) -> np.ndarray:
    """Real orthonormal spherical harmonic Y_lm at the directions of ``points``.

    m > 0 uses cos(m phi), m < 0 uses sin(|m| phi); no Condon-Shortley phase.
    """
    if l < 0 or abs(m) > l:
        raise ValueError(f"invalid spherical harmonic index (l={l}, m={m})")
    p = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(p, axis=1)
    safe = np.where(r > 0, r, 1.0)
    ct = np.where(r > 0, p[:, 2] / safe, 1.0)
    phi = np.arctan2(p[:, 1], p[:, 0])
    am = abs(m)
    norm = np.sqrt((2 * l + 1) / (4 * np.pi) * factorial(l - am) / factorial(l + am))
    leg = (-1) ** am * lpmv(am, l, np.clip(ct, -1.0, 1.0))
    if m == 0:
        return norm * leg
    if m > 0:
        return np.sqrt(2.0) * norm * leg * np.cos(am * phi)
    return np.sqrt(2.0) * norm * leg * np.sin(am * phi)


@dataclass(frozen=True)
class SphericalHarmonicField:
    """f = sum c_lm Y_lm with real orthonormal harmonics; ``coefficients`` maps (l, m) -> c."""

    coefficients: dict

    def __post_init__(self):
        for l, m in self.coefficients:
            if l < 0 or abs(m) > l:
                raise ValueError(f"invalid spherical harmonic index (l={l}, m={m})")

    @classmethod
    def from_terms(cls, terms: Sequence[Sequence[float]]) -> "SphericalHarmonicField":
        coeffs: dict = {}
        for l, m, c in terms:
            key = (int(l), int(m))
            coeffs[key] = coeffs.get(key, 0.0) + float(c)
        return cls(coeffs)

    @property
    def l_max(self) -> int:
        return max((l for l, _ in self.coefficients), default=0)

    def scaled(self, alpha: float, beta: float = 0.0) -> "SphericalHarmonicField":
        coeffs = {key: alpha * c for key, c in self.coefficients.items()}
        # a constant beta is beta * sqrt(4 pi) * Y_00
        coeffs[(0, 0)] = coeffs.get((0, 0), 0.0) + beta * np.sqrt(4 * np.pi)
        return SphericalHarmonicField(coeffs)

    def __call__(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(p))
        for (l, m), c in sorted(self.coefficients.items()):
            out += c * real_sph_harm(l, m, p)
        return out

    def laplace_beltrami(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(p))
        for (l, m), c in sorted(self.coefficients.items()):
            out += -l * (l + 1) * c * real_sph_harm(l, m, p)
        return out

    def harmonic_extension(self, points) -> np.ndarray:
        """sum c_lm |r|^l Y_lm(r / |r|)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        r = np.linalg.norm(p, axis=1)
        out = np.zeros(len(p))
        for (l, m), c in sorted(self.coefficients.items()):
            out += c * r**l * real_sph_harm(l, m, p)
        return out


def sample_sphere(field: SphericalHarmonicField, quad: SphereQuadrature) -> BoundaryField:
    return BoundaryField(field(quad.nodes), quad)


def tangential_laplacian_sphere(field: SphericalHarmonicField, quad: SphereQuadrature) -> BoundaryField:
    """Laplace-Beltrami of ``field`` at the quadrature nodes (mode-wise -l(l+1))."""
    return BoundaryField(field.laplace_beltrami(quad.nodes), quad)
