"""Free-space Laplace Green's functions.

The convention is fixed by the sign of the delta source:

    sign = +1:  lap G = delta,   G_2D = ln|r - r'| / (2 pi),   G_3D = -1 / (4 pi |r - r'|)
    sign = -1:  the negatives of the above.

Normal derivatives differentiate the *second* (source) argument r'.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INV_2PI = 1.0 / (2.0 * np.pi)
INV_4PI = 1.0 / (4.0 * np.pi)


@dataclass(frozen=True)
class KernelConvention:
    dimension: int = 2
    sign: int = 1

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dimension}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def tag(self) -> str:
        return f"G{self.dimension}D{'+' if self.sign > 0 else '-'}"

    def flipped(self) -> "KernelConvention":
        return KernelConvention(self.dimension, -self.sign)


PLANE = KernelConvention(2, 1)
SPACE = KernelConvention(3, 1)


def _separation(r, rp) -> np.ndarray:
    d = np.asarray(r, dtype=float) - np.asarray(rp, dtype=float)
    dist = np.sqrt((d * d).sum(axis=-1))
    if np.any(dist == 0.0):
        raise ValueError("Green's function evaluated at coincident points")
    return dist


def green(conv: KernelConvention, r, rp):
    """G(r, r') under ``conv``; broadcasts over leading axes."""
    dist = _separation(r, rp)
    if conv.dimension == 2:
        val = INV_2PI * np.log(dist)
    else:
        val = -INV_4PI / dist
    return conv.sign * val


def green_dnormal(conv: KernelConvention, r, rp, n_p):
    """grad' G(r, r') . n' with the gradient taken in r' = rp."""
    dist = _separation(r, rp)
    d = np.asarray(rp, dtype=float) - np.asarray(r, dtype=float)
    proj = (d * np.asarray(n_p, dtype=float)).sum(axis=-1)
    if conv.dimension == 2:
        val = INV_2PI * proj / dist**2
    else:
        val = INV_4PI * proj / dist**3
    return conv.sign * val


def diagonal_log_self_weight(h: float) -> float:
    """Integral of ln|s| / (2 pi) over a flat element of length h centred on 0.

    Equals (h / 2 pi) (ln(h/2) - 1). First-order accurate as a Nystrom
    self-term: it drops the midpoint-rule error of the neighbouring cells.
    """
    if not h > 0:
        raise ValueError(f"element length must be positive, got {h}")
    return INV_2PI * h * (np.log(0.5 * h) - 1.0)


def periodic_log_self_weight(weight: float) -> float:
    """Corrected trapezoid self-term for the 2-D log kernel.

    Valid for rules uniform in a 2*pi-periodic curve parameter, where
    ``weight = h |gamma'(t_i)|``. The punctured sum plus
    ``(weight / 2 pi) ln(weight / 2 pi)`` at the singular node reproduces the
    log-kernel integral to O(h^3) for smooth densities.
    """
    if not weight > 0:
        raise ValueError(f"element weight must be positive, got {weight}")
    return INV_2PI * weight * np.log(weight / (2.0 * np.pi))


def green_matrix(conv: KernelConvention, targets, sources) -> np.ndarray:
    """Dense G(targets_i, sources_j); rejects coincident pairs."""
    t = np.asarray(targets, dtype=float)
    s = np.asarray(sources, dtype=float)
    return green(conv, t[:, None, :], s[None, :, :])


def dnormal_matrix(conv: KernelConvention, targets, sources, normals) -> np.ndarray:
    t = np.asarray(targets, dtype=float)
    s = np.asarray(sources, dtype=float)
    return green_dnormal(conv, t[:, None, :], s[None, :, :], np.asarray(normals, dtype=float)[None, :, :])
