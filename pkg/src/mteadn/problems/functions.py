"""Base landscapes used as the distance function ``g`` of each task.

All kinds reach 0 exactly at the zero vector and are nonnegative elsewhere.
Rosenbrock is evaluated at ``z + 1`` so that its optimum also sits at zero.
"""
from __future__ import annotations

import math

import numpy as np

BASE_KINDS = ("sphere", "rosenbrock", "ackley", "rastrigin", "griewank", "meanabs")


def sphere(z: np.ndarray) -> float:
    return float(np.dot(z, z))


def rosenbrock(z: np.ndarray) -> float:
    v = z + 1.0
    return float(np.sum(100.0 * (v[1:] - v[:-1] ** 2) ** 2 + (1.0 - v[:-1]) ** 2))


def ackley(z: np.ndarray) -> float:
    d = z.size
    a = -20.0 * math.exp(-0.2 * math.sqrt(float(np.dot(z, z)) / d))
    b = -math.exp(float(np.sum(np.cos(2.0 * math.pi * z))) / d)
    # float cancellation can leave a tiny negative residue at the optimum
    return max(a + b + 20.0 + math.e, 0.0)


def rastrigin(z: np.ndarray) -> float:
    return float(np.sum(z * z - 10.0 * np.cos(2.0 * math.pi * z) + 10.0))


def _griewank_divisors(d: int) -> np.ndarray:
    return np.sqrt(np.arange(1, d + 1, dtype=float))


def griewank(z: np.ndarray) -> float:
    val = 1.0 + float(np.dot(z, z)) / 4000.0 - float(np.prod(np.cos(z / _griewank_divisors(z.size))))
    return max(val, 0.0)


def meanabs(z: np.ndarray) -> float:
    return float(np.mean(np.abs(z)))


_TABLE = {
    "sphere": sphere,
    "rosenbrock": rosenbrock,
    "ackley": ackley,
    "rastrigin": rastrigin,
    "griewank": griewank,
    "meanabs": meanabs,
}


def base_function(kind: str):
    try:
        return _TABLE[kind]
    except KeyError:
        raise ValueError(f"unknown base function {kind!r}; expected one of {BASE_KINDS}") from None


def evaluate_base_function(kind: str, z) -> float:
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise ValueError("base function needs a non-empty vector")
    return base_function(kind)(z)
