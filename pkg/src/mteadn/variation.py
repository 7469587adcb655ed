"""Offspring production: DE/rand/1/bin followed by polynomial mutation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import clamp_repair


@dataclass(frozen=True)
class VariationParams:
    """DE and polynomial-mutation settings.

    ``p_m=None`` means ``1/D`` with ``D`` the length of the mutated vector.
    """

    F: float = 0.5
    Cr: float = 0.9
    eta_m: float = 20.0
    p_m: float | None = None

    def __post_init__(self):
        if not self.F > 0:
            raise ValueError("F must be positive")
        if not 0.0 <= self.Cr <= 1.0:
            raise ValueError("Cr must lie in [0, 1]")
        if not self.eta_m > 0:
            raise ValueError("eta_m must be positive")
        if self.p_m is not None and not 0.0 <= self.p_m <= 1.0:
            raise ValueError("p_m must lie in [0, 1]")

    def mutation_rate(self, dim: int) -> float:
        return 1.0 / dim if self.p_m is None else self.p_m


def de_rand_1_bin(x1, x2, x3, params: VariationParams, rng: np.random.Generator) -> np.ndarray:
    """Binomial DE crossover of ``x1`` with the mutant ``x1 + F (x2 - x3)``.

    One uniformly drawn coordinate always takes the mutant value.
    """
    x1 = np.asarray(x1, dtype=float)
    d = x1.size
    mask = rng.random(d) < params.Cr
    mask[rng.integers(d)] = True
    mutant = x1 + params.F * (np.asarray(x2, dtype=float) - np.asarray(x3, dtype=float))
    return np.where(mask, mutant, x1)


def _pm_delta_scalar(gene: float, r: float, eta: float, mut_pow: float) -> float:
    if r < 0.5:
        val = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - gene) ** (eta + 1.0)
        return val**mut_pow - 1.0
    val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * gene ** (eta + 1.0)
    return 1.0 - val**mut_pow


def pm_delta(gene: np.ndarray, r: np.ndarray, eta: float) -> np.ndarray:
    """Bounded polynomial-mutation step for genes in ``[0, 1]`` given uniforms ``r``."""
    mut_pow = 1.0 / (eta + 1.0)
    if gene.size == 1:
        return np.array([_pm_delta_scalar(float(gene[0]), float(r[0]), eta, mut_pow)])
    lo = r < 0.5
    delta = np.empty_like(gene)
    # left branch moves toward 0, right branch toward 1
    xy = 1.0 - gene[lo]
    val = 2.0 * r[lo] + (1.0 - 2.0 * r[lo]) * xy ** (eta + 1.0)
    delta[lo] = val**mut_pow - 1.0
    hi = ~lo
    xy = gene[hi]
    val = 2.0 * (1.0 - r[hi]) + 2.0 * (r[hi] - 0.5) * xy ** (eta + 1.0)
    delta[hi] = 1.0 - val**mut_pow
    return delta


def polynomial_mutation(u, params: VariationParams, rng: np.random.Generator) -> np.ndarray:
    """Perturb each gene with probability ``p_m`` on the ``[0, 1]`` gene domain.

    A selected gene that sits outside ``[0, 1]`` (DE overshoot) is first
    clipped onto the domain, since the bounded formulation is undefined
    outside it. Unselected genes pass through unchanged.
    """
    y = np.array(u, dtype=float)
    p_m = params.mutation_rate(y.size)
    sel = np.flatnonzero(rng.random(y.size) < p_m)
    if sel.size:
        gene = np.minimum(np.maximum(y[sel], 0.0), 1.0)
        r = rng.random(sel.size)
        y[sel] = gene + pm_delta(gene, r, params.eta_m)
    return y


def pick_two(n: int, rng: np.random.Generator) -> tuple[int, int]:
    """Two distinct indices drawn uniformly from ``range(n)``."""
    if n < 2:
        raise ValueError("candidate pool too small")
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    if j >= i:
        j += 1
    return i, j


def reproduce(x, candidates, params: VariationParams, rng: np.random.Generator) -> np.ndarray:
    """DE/rand/1/bin with ``x`` as base and two distinct pool members, then PM and repair."""
    candidates = np.asarray(candidates, dtype=float)
    if candidates.ndim != 2 or candidates.shape[0] < 2:
        raise ValueError("candidate pool too small")
    i, j = pick_two(candidates.shape[0], rng)
    u = de_rand_1_bin(x, candidates[i], candidates[j], params, rng)
    return clamp_repair(polynomial_mutation(u, params, rng))
