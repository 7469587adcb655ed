"""Independent reference transcriptions used to check the vectorized code.

Plain Python loops, no imports from the package.
"""
import itertools
import math
import random

import numpy as np


def grey_relational_loops(y, xs, rho):
    m, n = len(xs), len(y)
    delta = [[abs(y[k] - xs[i][k]) for k in range(n)] for i in range(m)]
    d_min = min(min(row) for row in delta)
    d_max = max(max(row) for row in delta)
    if d_max == 0:
        return [1.0] * m
    out = []
    for i in range(m):
        acc = 0.0
        for k in range(n):
            acc += (d_min + rho * d_max) / (delta[i][k] + rho * d_max)
        out.append(acc / n)
    return out


def igd_loops(approx, reference):
    total = 0.0
    for x in reference:
        best = math.inf
        for y in approx:
            d = math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))
            best = min(best, d)
        total += best**2
    return math.sqrt(total) / len(reference)


def hv_inclusion_exclusion(points, ref):
    """Union volume of boxes ``[p, ref]`` by inclusion-exclusion (small n only)."""
    boxes = [p for p in points if all(a < r for a, r in zip(p, ref))]
    total = 0.0
    for size in range(1, len(boxes) + 1):
        for subset in itertools.combinations(boxes, size):
            corner = [max(p[d] for p in subset) for d in range(len(ref))]
            vol = 1.0
            for c, r in zip(corner, ref):
                vol *= max(r - c, 0.0)
            total += (-1) ** (size + 1) * vol
    return total


def hv_monte_carlo(points, ref, samples, seed, chunk=1_000_000):
    """Estimate and standard error of the dominated area inside ``[min(points), ref]``."""
    pts = np.asarray(points, dtype=float)
    ref = np.asarray(ref, dtype=float)
    lo = np.minimum(pts.min(axis=0), ref)
    area = float(np.prod(ref - lo))
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        u = lo + (ref - lo) * rng.random((n, 2))
        dom = np.zeros(n, dtype=bool)
        for p in pts:
            dom |= (u[:, 0] >= p[0]) & (u[:, 1] >= p[1])
        hits += int(dom.sum())
        done += n
    frac = hits / samples
    return area * frac, area * math.sqrt(frac * (1 - frac) / samples)


def nearest_sorted_neighbors(weights, t):
    n = len(weights)
    out = []
    for i in range(n):
        dists = []
        for j in range(n):
            d = math.sqrt(sum((a - b) ** 2 for a, b in zip(weights[i], weights[j])))
            dists.append((round(d, 12), j))
        dists.sort()
        out.append([j for _, j in dists[:t]])
    return out


def pm_quantile_delta(r, gene, eta):
    """Bounded polynomial-mutation step written straight from the quantile formula."""
    if r < 0.5:
        return (2 * r + (1 - 2 * r) * (1 - gene) ** (eta + 1)) ** (1 / (eta + 1)) - 1
    return 1 - (2 * (1 - r) + 2 * (r - 0.5) * (1 - (1 - gene)) ** (eta + 1)) ** (1 / (eta + 1))


def random_front(rng: random.Random, n, lo=0.0, hi=1.0):
    return [(rng.uniform(lo, hi), rng.uniform(lo, hi)) for _ in range(n)]
