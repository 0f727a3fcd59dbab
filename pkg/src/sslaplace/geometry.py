"""Boundary geometry: star-shaped closed curves, their Nystrom meshes, the
unit-sphere product quadrature, and point/region classification.

Curves are parametrized by the polar angle about their center,

    gamma(t) = center + r(t) * (cos t, sin t),
    r(t) = a0 + sum_k (a_k cos kt + b_k sin kt),

traversed counter-clockwise, so the outward normal is the unit tangent
rotated by -90 degrees.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * np.pi

# dense sampling used for positivity checks and point classification
_CHECK_SAMPLES = 4096
_CLASSIFY_SAMPLES = 4096


class RegionLabel(str, enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    NEAR_BOUNDARY = "near_boundary"


@dataclass(frozen=True)
class ParametricCurve:
    """Smooth star-shaped closed curve with closed-form derivatives.

    ``kind`` is ``"circle"`` (constant radius) or ``"fourier-radial"``.
    ``radial_coefficients`` holds ``(k, a_k, b_k)`` triples for k >= 1;
    the constant term is ``radius``.
    """

    kind: str
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    radial_coefficients: tuple[tuple[int, float, float], ...] = ()

    def _radial(self, t, order: int = 0):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.radius if order == 0 else 0.0)
        for k, a, b in self.radial_coefficients:
            c, s = np.cos(k * t), np.sin(k * t)
            if order == 0:
                out = out + a * c + b * s
            elif order == 1:
                out = out + k * (-a * s + b * c)
            else:
                out = out - k * k * (a * c + b * s)
        return out

    def radial(self, t):
        return self._radial(t, 0)

    def position(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        r = self._radial(t)
        return np.stack([self.center[0] + r * np.cos(t), self.center[1] + r * np.sin(t)], axis=-1)

    def d1(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        r, rp = self._radial(t), self._radial(t, 1)
        c, s = np.cos(t), np.sin(t)
        return np.stack([rp * c - r * s, rp * s + r * c], axis=-1)

    def d2(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        r, rp, rpp = self._radial(t), self._radial(t, 1), self._radial(t, 2)
        c, s = np.cos(t), np.sin(t)
        return np.stack(
            [(rpp - r) * c - 2.0 * rp * s, (rpp - r) * s + 2.0 * rp * c], axis=-1
        )

    def speed(self, t):
        return np.linalg.norm(self.d1(t), axis=-1)

    def curvature(self, t):
        g1, g2 = self.d1(t), self.d2(t)
        cross = g1[..., 0] * g2[..., 1] - g1[..., 1] * g2[..., 0]
        return cross / np.linalg.norm(g1, axis=-1) ** 3

    def moved(self, angle: float, shift: Sequence[float] = (0.0, 0.0)) -> "ParametricCurve":
        """Rigidly move the curve: rotate by ``angle`` about the origin, then translate."""
        ca, sa = np.cos(angle), np.sin(angle)
        cx, cy = self.center
        center = (ca * cx - sa * cy + shift[0], sa * cx + ca * cy + shift[1])
        coeffs = []
        for k, a, b in self.radial_coefficients:
            ck, sk = np.cos(k * angle), np.sin(k * angle)
            coeffs.append((k, a * ck - b * sk, a * sk + b * ck))
        return ParametricCurve(self.kind, center, self.radius, tuple(coeffs))


def make_circle(radius: float = 1.0, center: Sequence[float] = (0.0, 0.0)) -> ParametricCurve:
    if not radius > 0:
        raise ValueError(f"circle radius must be positive, got {radius}")
    return ParametricCurve("circle", (float(center[0]), float(center[1])), float(radius))


def make_fourier_curve(
    a0: float,
    coefficients: Sequence[Sequence[float]] = (),
    center: Sequence[float] = (0.0, 0.0),
) -> ParametricCurve:
    """Star-shaped curve r(t) = a0 + sum a_k cos kt + b_k sin kt.

    Raises ``ValueError`` if r(t) <= 0 anywhere on a 4096-point check grid.
    """
    coeffs = []
    for entry in coefficients:
        k, a, b = entry
        if int(k) != k or k < 1:
            raise ValueError(f"radial mode index must be an integer >= 1, got {k}")
        coeffs.append((int(k), float(a), float(b)))
    curve = ParametricCurve(
        "fourier-radial", (float(center[0]), float(center[1])), float(a0), tuple(coeffs)
    )
    t = TWO_PI * np.arange(_CHECK_SAMPLES) / _CHECK_SAMPLES
    rmin = curve.radial(t).min()
    if not rmin > 0:
        raise ValueError(f"radial function is not positive (min r = {rmin:.6g}); curve is not star-shaped")
    return curve


@dataclass(frozen=True, eq=False)
class BoundaryMesh:
    """Midpoint-rule Nystrom mesh of a closed curve.

    Nodes sit at t_j = 2*pi*(j + 1/2)/N. Element endpoints t_j = 2*pi*j/N are
    the staggered collocation points used by calibration.
    """

    nodes: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    arc_positions: np.ndarray
    parameter_values: np.ndarray
    curvature: np.ndarray
    speeds: np.ndarray
    perimeter: float
    source_curve: ParametricCurve

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def dimension(self) -> int:
        return 2

    @property
    def parameter_step(self) -> float:
        return TWO_PI / self.n

    def collocation_parameters(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n

    def collocation_points(self) -> np.ndarray:
        return self.source_curve.position(self.collocation_parameters())

    def default_delta(self) -> float:
        return 2.0 * float(self.weights.max())


def mesh_curve(curve: ParametricCurve, n: int) -> BoundaryMesh:
    if n < 8:
        raise ValueError(f"mesh needs at least 8 nodes, got {n}")
    h = TWO_PI / n
    t = h * (np.arange(n) + 0.5)
    g1 = curve.d1(t)
    speed = np.linalg.norm(g1, axis=1)
    tangents = g1 / speed[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])
    weights = speed * h
    # arc position of node j: half its own element plus all earlier elements
    arc = np.cumsum(weights) - 0.5 * weights
    return BoundaryMesh(
        nodes=curve.position(t),
        tangents=tangents,
        normals=normals,
        weights=weights,
        arc_positions=arc,
        parameter_values=t,
        curvature=curve.curvature(t),
        speeds=speed,
        perimeter=float(weights.sum()),
        source_curve=curve,
    )


def _dense_polyline(curve: ParametricCurve, n: int = _CLASSIFY_SAMPLES) -> np.ndarray:
    t = TWO_PI * np.arange(n) / n
    return curve.position(t)


def winding_numbers(curve: ParametricCurve, points, samples: int = _CLASSIFY_SAMPLES) -> np.ndarray:
    """Discrete angle-sum winding number of ``points`` about the curve."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = _dense_polyline(curve, samples)
    out = np.empty(len(pts))
    for lo in range(0, len(pts), 512):
        p = pts[lo:lo + 512]
        v = poly[None, :, :] - p[:, None, :]
        w = np.roll(v, -1, axis=1)
        cross = v[..., 0] * w[..., 1] - v[..., 1] * w[..., 0]
        dot = (v * w).sum(axis=-1)
        out[lo:lo + 512] = np.arctan2(cross, dot).sum(axis=1) / TWO_PI
    return out


def distance_to_curve(curve: ParametricCurve, points, samples: int = _CLASSIFY_SAMPLES) -> np.ndarray:
    """Point-to-polyline distance on a dense sampling of the curve."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a = _dense_polyline(curve, samples)
    seg = np.roll(a, -1, axis=0) - a
    seg_len2 = (seg * seg).sum(axis=1)
    out = np.empty(len(pts))
    for lo in range(0, len(pts), 512):
        p = pts[lo:lo + 512]
        ap = p[:, None, :] - a[None, :, :]
        s = np.clip((ap * seg[None]).sum(axis=-1) / seg_len2[None], 0.0, 1.0)
        d = ap - s[..., None] * seg[None]
        out[lo:lo + 512] = np.sqrt((d * d).sum(axis=-1).min(axis=1))
    return out


def classify_points(curve: ParametricCurve, points, delta: float) -> list[RegionLabel]:
    if not delta > 0:
        raise ValueError(f"near-boundary band must be positive, got {delta}")
    dist = distance_to_curve(curve, points)
    wind = winding_numbers(curve, points)
    labels = []
    for d, w in zip(dist, wind):
        if d < delta:
            labels.append(RegionLabel.NEAR_BOUNDARY)
        elif abs(w) > 0.5:
            labels.append(RegionLabel.INSIDE)
        else:
            labels.append(RegionLabel.OUTSIDE)
    return labels


def classify_point(curve: ParametricCurve, p, delta: float) -> RegionLabel:
    return classify_points(curve, [p], delta)[0]


# ---------------------------------------------------------------------------
# Unit sphere
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    """Gauss-Legendre in cos(polar angle) crossed with uniform longitudes."""

    nodes: np.ndarray
    weights: np.ndarray
    resolution: tuple[int, int]
    polar_nodes: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def dimension(self) -> int:
        return 3

    def collocation_points(self) -> np.ndarray:
        """Staggered points: polar midpoints between Gauss nodes, half-offset longitudes."""
        n_lat, n_lon = self.resolution
        theta = np.arccos(self.polar_nodes)
        mid = 0.5 * (theta[1:] + theta[:-1])
        phi = TWO_PI * (np.arange(n_lon) + 0.5) / n_lon
        return _sphere_points(np.cos(mid), phi)

    def default_delta(self) -> float:
        n_lat, n_lon = self.resolution
        return 2.0 * max(np.pi / n_lat, TWO_PI / n_lon)


def _sphere_points(cos_theta, phi) -> np.ndarray:
    ct, ph = np.meshgrid(cos_theta, phi, indexing="ij")
    st = np.sqrt(np.clip(1.0 - ct * ct, 0.0, None))
    pts = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1)
    return pts.reshape(-1, 3)


def make_sphere_quadrature(n_lat: int, n_lon: int) -> SphereQuadrature:
    if n_lat < 4 or n_lon < 8:
        raise ValueError(f"sphere quadrature needs n_lat >= 4 and n_lon >= 8, got ({n_lat}, {n_lon})")
    x, wx = np.polynomial.legendre.leggauss(n_lat)
    nodes = _sphere_points(x, TWO_PI * np.arange(n_lon) / n_lon)
    # renormalize: sqrt(1 - x^2) rounding leaves |node| off by an ulp or two
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    weights = np.repeat(wx, n_lon) * (TWO_PI / n_lon)
    return SphereQuadrature(nodes, weights, (n_lat, n_lon), x)


def classify_points_sphere(points, delta: float) -> list[RegionLabel]:
    if not delta > 0:
        raise ValueError(f"near-boundary band must be positive, got {delta}")
    radii = np.linalg.norm(np.atleast_2d(np.asarray(points, dtype=float)), axis=1)
    labels = []
    for r in radii:
        if abs(r - 1.0) < delta:
            labels.append(RegionLabel.NEAR_BOUNDARY)
        elif r < 1.0:
            labels.append(RegionLabel.INSIDE)
        else:
            labels.append(RegionLabel.OUTSIDE)
    return labels


# ---------------------------------------------------------------------------
# Sample grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Rectangular grid ``bounds = (xmin, xmax, ymin, ymax)`` with spacing ``step``.

    For sphere problems the grid lies in a coordinate plane (``plane`` is
    ``"xy"``, ``"xz"`` or ``"yz"``) at ``offset`` along the remaining axis.
    """

    bounds: tuple[float, float, float, float]
    step: float
    plane: str = "xz"
    offset: float = 0.0

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        x0, x1, y0, y1 = self.bounds
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"grid bounds must be increasing, got {self.bounds}")
        nx = int(round((x1 - x0) / self.step)) + 1
        ny = int(round((y1 - y0) / self.step)) + 1
        return np.linspace(x0, x0 + (nx - 1) * self.step, nx), np.linspace(y0, y0 + (ny - 1) * self.step, ny)

    def points2d(self) -> np.ndarray:
        xs, ys = self.axes()
        gx, gy = np.meshgrid(xs, ys, indexing="xy")
        return np.column_stack([gx.ravel(), gy.ravel()])

    def points3d(self) -> np.ndarray:
        p = self.points2d()
        axes = {"xy": (0, 1, 2), "xz": (0, 2, 1), "yz": (1, 2, 0)}[self.plane]
        out = np.empty((len(p), 3))
        out[:, axes[0]] = p[:, 0]
        out[:, axes[1]] = p[:, 1]
        out[:, axes[2]] = self.offset
        return out


@dataclass
class FieldGrid:
    """Grid samples with region labels and per-solver values.

    ``values`` maps a solver tag (``"ss"``, ``"bem"``) to an array aligned with
    ``points``; NaN marks points where a solver is not defined.
    """

    spec: GridSpec
    points: np.ndarray
    labels: list[RegionLabel]
    delta: float
    values: dict[str, np.ndarray] = field(default_factory=dict)
    exact: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.points)

    def inside_mask(self) -> np.ndarray:
        return np.array([lab is RegionLabel.INSIDE for lab in self.labels])

    def errors(self, tag: str) -> np.ndarray | None:
        """|value - exact| at inside points, NaN elsewhere."""
        if self.exact is None or tag not in self.values:
            return None
        err = np.abs(self.values[tag] - self.exact)
        err[~self.inside_mask()] = np.nan
        return err
