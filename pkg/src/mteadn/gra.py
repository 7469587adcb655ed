"""Grey relational analysis used to retarget external neighborhoods.

Sequences are unified-space vectors, already inside ``[0, 1]``, so no extra
normalization is applied before the deviations are taken.
"""
from __future__ import annotations

import numpy as np

DEFAULT_RHO = 0.5


def grey_relational_degree(reference, compared, rho: float = DEFAULT_RHO) -> np.ndarray:
    """Grey relational degree of each compared sequence to the reference.

    Parameters
    ----------
    reference : array_like, shape (n,)
    compared : array_like, shape (m, n)
    rho : float
        Distinguishing coefficient in ``[0, 1]``.

    Returns
    -------
    ndarray, shape (m,)
        Degrees in ``(0, 1]``. When every compared sequence equals the
        reference (largest deviation is zero) all degrees are 1.
    """
    y = np.asarray(reference, dtype=float)
    x = np.atleast_2d(np.asarray(compared, dtype=float))
    if y.ndim != 1 or y.size == 0:
        raise ValueError("reference must be a non-empty 1-D sequence")
    if x.shape[1] != y.size or x.shape[0] == 0:
        raise ValueError("compared sequences must be non-empty and match the reference length")
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    delta = np.abs(x - y)
    d_max = delta.max()
    if d_max == 0.0:
        return np.ones(x.shape[0])
    d_min = delta.min()
    coef = (d_min + rho * d_max) / (delta + rho * d_max)
    return coef.mean(axis=1)


def neighborhood_mean(population: np.ndarray, index_set) -> np.ndarray:
    idx = np.asarray(index_set, dtype=int)
    if idx.size == 0:
        raise ValueError("empty index set")
    return np.asarray(population, dtype=float)[idx].mean(axis=0)


def argmax_relational(r) -> int:
    """Index of the largest degree; ties go to the lowest index."""
    r = np.asarray(r, dtype=float)
    if r.size == 0:
        raise ValueError("empty degree vector")
    return int(np.argmax(r))
