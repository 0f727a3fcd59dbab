"""Direct O(M N) potential sums, parallel over targets.

Each target's sum runs over sources in ascending index order, so results do
not depend on the thread count.
"""

import os

import numba
import numpy as np

if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "workqueue"


@numba.njit(parallel=True, cache=True)
def _log_sum(targets, sources, charge, out, mindist):
    for i in numba.prange(targets.shape[0]):
        acc = 0.0
        m2 = np.inf
        for j in range(sources.shape[0]):
            dx = targets[i, 0] - sources[j, 0]
            dy = targets[i, 1] - sources[j, 1]
            d2 = dx * dx + dy * dy
            if d2 < m2:
                m2 = d2
            acc += charge[j] * 0.5 * np.log(d2)
        out[i] = acc
        mindist[i] = np.sqrt(m2)


@numba.njit(parallel=True, cache=True)
def _inv_sum(targets, sources, charge, out, mindist):
    for i in numba.prange(targets.shape[0]):
        acc = 0.0
        m2 = np.inf
        for j in range(sources.shape[0]):
            dx = targets[i, 0] - sources[j, 0]
            dy = targets[i, 1] - sources[j, 1]
            dz = targets[i, 2] - sources[j, 2]
            d2 = dx * dx + dy * dy + dz * dz
            if d2 < m2:
                m2 = d2
            acc += charge[j] / np.sqrt(d2)
        out[i] = acc
        mindist[i] = np.sqrt(m2)


@numba.njit(parallel=True, cache=True)
def _inv_sum_subtracted(targets, target_density, sources, charge_density, weights, out):
    # sum_j (sigma_j - sigma(t_i)) w_j / |t_i - s_j|
    for i in numba.prange(targets.shape[0]):
        acc = 0.0
        for j in range(sources.shape[0]):
            dx = targets[i, 0] - sources[j, 0]
            dy = targets[i, 1] - sources[j, 1]
            dz = targets[i, 2] - sources[j, 2]
            acc += (charge_density[j] - target_density[i]) * weights[j] / np.sqrt(dx * dx + dy * dy + dz * dz)
        out[i] = acc


def log_potential(targets, sources, charge):
    """sum_j charge_j ln|t_i - s_j| and the min distance per target."""
    t = np.ascontiguousarray(targets, dtype=float)
    out = np.empty(len(t))
    mind = np.empty(len(t))
    _log_sum(t, np.ascontiguousarray(sources, dtype=float), np.ascontiguousarray(charge, dtype=float), out, mind)
    return out, mind


def inverse_distance_potential(targets, sources, charge):
    """sum_j charge_j / |t_i - s_j| and the min distance per target."""
    t = np.ascontiguousarray(targets, dtype=float)
    out = np.empty(len(t))
    mind = np.empty(len(t))
    _inv_sum(t, np.ascontiguousarray(sources, dtype=float), np.ascontiguousarray(charge, dtype=float), out, mind)
    return out, mind


def inverse_distance_subtracted(targets, target_density, sources, density, weights):
    t = np.ascontiguousarray(targets, dtype=float)
    out = np.empty(len(t))
    _inv_sum_subtracted(
        t,
        np.ascontiguousarray(target_density, dtype=float),
        np.ascontiguousarray(sources, dtype=float),
        np.ascontiguousarray(density, dtype=float),
        np.ascontiguousarray(weights, dtype=float),
        out,
    )
    return out


def set_threads(n: int) -> None:
    """Limit worker threads; 0 keeps numba's default."""
    if n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
