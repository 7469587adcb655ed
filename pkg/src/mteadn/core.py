"""Shared domain types: unified-space decoding, repair, ideal points, budgets, RNG.

Every individual lives in the unified search space ``[0, 1]^D_u`` where
``D_u`` is the largest native dimension among the tasks. A task with
``D_k < D_u`` reads only the first ``D_k`` coordinates.

Randomness uses numpy's PCG64 bit generator seeded through ``SeedSequence``;
identical seeds produce identical streams on every platform numpy supports.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np


class BudgetExhausted(RuntimeError):
    """Raised when an evaluation is requested after the budget is spent."""

    def __init__(self, limit: int):
        super().__init__(f"budget exceeded (limit {limit})")
        self.limit = limit


@dataclass(frozen=True)
class TaskSpace:
    """Box bounds of one task's native decision space."""

    lower: np.ndarray
    upper: np.ndarray
    n_obj: int = 2

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size == 0:
            raise ValueError("lower and upper must be 1-D vectors of equal length")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        if self.n_obj < 1:
            raise ValueError("n_obj must be positive")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dimension(self) -> int:
        return self.lower.size


def map_to_task_space(x: np.ndarray, space: TaskSpace) -> np.ndarray:
    """Decode a unified vector into the task's native box.

    Only the first ``space.dimension`` coordinates of ``x`` are used.
    """
    d = space.dimension
    x = np.asarray(x, dtype=float)
    if x.size < d:
        raise ValueError(f"unified vector has {x.size} genes, task needs {d}")
    return space.lower + (space.upper - space.lower) * x[:d]


def clamp_repair(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.isfinite(x).all():
        raise ValueError("non-finite gene")
    return np.minimum(np.maximum(x, 0.0), 1.0)


def update_ideal_point(z: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Componentwise running minimum. ``z`` may hold ``+inf`` before any evaluation."""
    z = np.asarray(z, dtype=float)
    f = np.asarray(f, dtype=float)
    if z.shape != f.shape:
        raise ValueError(f"objective count mismatch: ideal {z.shape} vs f {f.shape}")
    return np.minimum(z, f)


def empty_ideal_point(n_obj: int) -> np.ndarray:
    return np.full(n_obj, np.inf)


@dataclass
class EvalBudget:
    """Counts objective evaluations across all tasks of one run."""

    limit: int
    consumed: int = 0

    def __post_init__(self):
        if self.limit < 1:
            raise ValueError("budget limit must be positive")

    @property
    def remaining(self) -> int:
        return self.limit - self.consumed

    @property
    def exhausted(self) -> bool:
        return self.consumed >= self.limit

    def charge(self) -> None:
        if self.consumed >= self.limit:
            raise BudgetExhausted(self.limit)
        self.consumed += 1


def _key_to_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError("seed keys must be non-negative")
        return int(key)
    return zlib.crc32(str(key).encode("utf-8"))


def child_seed(root_seed: int, *keys) -> int:
    """Derive a 64-bit seed as a pure function of ``root_seed`` and ``keys``.

    String keys are hashed with CRC-32 so that instance and algorithm names
    map to stable integers regardless of Python's hash randomization.
    """
    ss = np.random.SeedSequence(entropy=int(root_seed), spawn_key=tuple(_key_to_int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass
class RunRecord:
    """Outcome of one repetition of one algorithm on one instance.

    ``checkpoints`` holds ``(evals, task, igd, hv)`` rows with ``task``
    zero-based. ``fronts`` and ``populations`` are per task, raw (not
    normalized) objective vectors and unified-space decision vectors.
    """

    instance: str
    algorithm: str
    repetition: int
    seed: int
    checkpoints: list = field(default_factory=list)
    fronts: list = field(default_factory=list)
    populations: list = field(default_factory=list)
    wall_clock: float = 0.0

    def final_metrics(self, task: int) -> tuple[float, float]:
        rows = [c for c in self.checkpoints if c[1] == task]
        if not rows:
            raise ValueError(f"no checkpoints recorded for task {task}")
        _, _, igd_value, hv_value = rows[-1]
        return igd_value, hv_value
