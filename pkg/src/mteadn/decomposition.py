"""Weight vectors, weight-space neighborhoods and the ASF scalarizing function."""
from __future__ import annotations

import numpy as np

#: Floor applied to weight components before they are inverted in :func:`asf`.
WEIGHT_FLOOR = 1e-6


def generate_weight_vectors(n: int, m: int = 2) -> np.ndarray:
    """Uniform simplex lattice for two objectives.

    Row ``i`` is ``(i/(n-1), 1 - i/(n-1))``; rows 0 and ``n-1`` are the extremes.
    """
    if m != 2:
        raise ValueError("unsupported objective count")
    if n < 2:
        raise ValueError("need at least 2 weight vectors")
    a = np.arange(n, dtype=float) / (n - 1)
    return np.column_stack([a, 1.0 - a])


def build_internal_neighborhood(weights: np.ndarray, t: int) -> np.ndarray:
    """Indices of the ``t`` nearest weight vectors for every weight vector.

    Distances are rounded to 1e-12 before a stable sort, so numerically
    equal distances tie-break to the lower index. Each row starts with the
    vector's own index.
    """
    weights = np.asarray(weights, dtype=float)
    n = weights.shape[0]
    if not 1 <= t <= n:
        raise ValueError(f"neighborhood size T={t} out of range [1, {n}]")
    diff = weights[:, None, :] - weights[None, :, :]
    dist = np.round(np.sqrt((diff**2).sum(axis=2)), 12)
    order = np.argsort(dist, axis=1, kind="stable")
    return order[:, :t].copy()


def floor_weights(w: np.ndarray, eps: float = WEIGHT_FLOOR) -> np.ndarray:
    return np.maximum(np.asarray(w, dtype=float), eps)


def asf(f: np.ndarray, w: np.ndarray, z: np.ndarray, eps: float = WEIGHT_FLOOR) -> float:
    """Achievement scalarizing value ``max_i |f_i - z_i| / w_i``."""
    f = np.asarray(f, dtype=float)
    z = np.asarray(z, dtype=float)
    w = floor_weights(w, eps)
    if not f.shape == w.shape == z.shape:
        raise ValueError("f, w and z must have the same length")
    return float(np.max(np.abs(f - z) / w))


def asf_rows(f: np.ndarray, inv_w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Row-wise ASF with pre-inverted floored weights (hot-path variant).

    ``f`` may be a single vector (broadcast against every weight row) or a
    matrix with one objective vector per weight row.
    """
    return np.max(np.abs(f - z) * inv_w, axis=-1)
