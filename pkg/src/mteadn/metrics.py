"""Front quality indicators and average ranking.

IGD defaults to the root-of-sum form ``sqrt(sum d_i^2) / |PF*|`` rather
than the common mean of distances; pass ``form="mean"`` for the latter.
The two differ by orders of magnitude, so outputs record which was used.
"""
from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

IGD_FORMS = ("printed", "mean")


def _as_front(points) -> np.ndarray:
    a = np.asarray(points, dtype=float)
    if a.ndim == 1:
        a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
    return a


def nondominated_filter(points) -> np.ndarray:
    """Non-dominated subset for minimization, duplicates collapsed.

    The result keeps the order of first occurrence.
    """
    s = _as_front(points)
    if s.shape[0] == 0:
        return s
    _, first = np.unique(s, axis=0, return_index=True)
    s = s[np.sort(first)]
    le = np.all(s[:, None, :] <= s[None, :, :], axis=2)
    lt = np.any(s[:, None, :] < s[None, :, :], axis=2)
    dominated = np.any(le & lt, axis=0)
    return s[~dominated]


def normalize_front(points, ideal, nadir) -> np.ndarray:
    ideal = np.asarray(ideal, dtype=float)
    nadir = np.asarray(nadir, dtype=float)
    span = nadir - ideal
    if np.any(span <= 0):
        raise ValueError("degenerate axis: nadir must exceed ideal on every objective")
    return (_as_front(points) - ideal) / span


def igd(approx, reference, form: str = "printed") -> float:
    s = _as_front(approx)
    ref = _as_front(reference)
    if s.shape[0] == 0 or ref.shape[0] == 0:
        raise ValueError("igd needs non-empty approximate and reference fronts")
    if form not in IGD_FORMS:
        raise ValueError(f"unknown IGD form {form!r}")
    d2 = ((ref[:, None, :] - s[None, :, :]) ** 2).sum(axis=2).min(axis=1)
    if form == "printed":
        return float(np.sqrt(d2.sum()) / ref.shape[0])
    return float(np.sqrt(d2).mean())


def hv_2d(points, ref_point) -> float:
    """Exact two-objective hypervolume by a staircase sweep."""
    s = _as_front(points)
    zr = np.asarray(ref_point, dtype=float)
    if zr.shape != (2,) or (s.size and s.shape[1] != 2):
        raise ValueError("hv_2d needs two objectives")
    if s.shape[0] == 0:
        return 0.0
    s = s[np.all(s < zr, axis=1)]
    if s.shape[0] == 0:
        return 0.0
    s = nondominated_filter(s)
    s = s[np.argsort(s[:, 0], kind="stable")]
    # after filtering, f2 strictly decreases along increasing f1
    prev_f2 = zr[1]
    total = 0.0
    for f1, f2 in s:
        total += (zr[0] - f1) * (prev_f2 - f2)
        prev_f2 = f2
    return float(total)


def friedman_average_rank(values, better: str = "lower") -> np.ndarray:
    """Average rank of each algorithm (rows) over instances (columns).

    Rank 1 is best; tied algorithms share the mean of their ranks.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 1:
        raise ValueError("values must be an (algorithms >= 2) x (instances >= 1) matrix")
    if np.any(np.isnan(v)):
        raise ValueError("missing cell in ranking matrix")
    if better not in ("lower", "higher"):
        raise ValueError("better must be 'lower' or 'higher'")
    keyed = v if better == "lower" else -v
    ranks = np.column_stack([rankdata(keyed[:, j], method="average") for j in range(v.shape[1])])
    return ranks.mean(axis=1)


class FrontScorer:
    """IGD and HV of raw objective vectors against one task's true front.

    Points are normalized by the ideal and nadir of the sampled true front
    before either indicator is computed.
    """

    def __init__(self, reference_front, hv_ref=(1.0, 1.0), igd_form: str = "printed"):
        ref = _as_front(reference_front)
        self.ideal = ref.min(axis=0)
        self.nadir = ref.max(axis=0)
        self.reference = normalize_front(ref, self.ideal, self.nadir)
        self.hv_ref = np.asarray(hv_ref, dtype=float)
        self.igd_form = igd_form

    def score(self, objectives) -> tuple[float, float]:
        front = normalize_front(nondominated_filter(objectives), self.ideal, self.nadir)
        return igd(front, self.reference, self.igd_form), hv_2d(front, self.hv_ref)
