"""ZDT-style two-objective tasks with shifted and rotated distance functions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import EvalBudget, TaskSpace
from .functions import base_function

SHAPES = ("convex", "concave")
INTERSECTIONS = ("CI", "PI", "NI")
SIMILARITIES = ("HS", "MS", "LS")


@dataclass(frozen=True)
class TaskDefinition:
    """One two-objective task.

    ``f1`` is the first decoded variable (bounded to ``[0, 1]``); the
    remaining variables feed ``g = 1 + base(M (y_tail - shift))`` and
    ``f2 = g * h(f1 / g)``.
    """

    name: str
    space: TaskSpace
    shape: str
    base: str
    shift: np.ndarray
    rotation: np.ndarray
    _fn: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown front shape {self.shape!r}")
        if self.space.n_obj != 2:
            raise ValueError("tasks must have exactly 2 objectives")
        if self.space.dimension < 2:
            raise ValueError("tasks need at least 2 decision variables")
        if self.space.lower[0] != 0.0 or self.space.upper[0] != 1.0:
            raise ValueError("the first decision variable must have bounds [0, 1]")
        tail = self.space.dimension - 1
        shift = np.asarray(self.shift, dtype=float)
        rot = np.asarray(self.rotation, dtype=float)
        if shift.shape != (tail,):
            raise ValueError(f"shift must have length {tail}")
        if rot.shape != (tail, tail):
            raise ValueError(f"rotation must be {tail}x{tail}")
        if not np.allclose(rot @ rot.T, np.eye(tail), rtol=0.0, atol=1e-9):
            raise ValueError("non-orthogonal matrix")
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "_fn", base_function(self.base))

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def tail_optimum(self) -> np.ndarray:
        """Unified-space coordinates ``2..D`` at which ``g`` equals 1."""
        lo = self.space.lower[1:]
        hi = self.space.upper[1:]
        return (self.shift - lo) / (hi - lo)

    def g(self, y: np.ndarray) -> float:
        return 1.0 + self._fn(self.rotation @ (y[1:] - self.shift))

    def objectives(self, x: np.ndarray) -> np.ndarray:
        d = self.space.dimension
        y = self.space.lower + (self.space.upper - self.space.lower) * x[:d]
        f1 = y[0]
        g = 1.0 + self._fn(self.rotation @ (y[1:] - self.shift))
        ratio = f1 / g
        if self.shape == "convex":
            h = 1.0 - math.sqrt(ratio)
        else:
            h = 1.0 - ratio * ratio
        return np.array([f1, g * h])


@dataclass(frozen=True)
class InstanceDefinition:
    name: str
    tasks: tuple
    intersection: str
    similarity: str

    def __post_init__(self):
        if len(self.tasks) < 1:
            raise ValueError("an instance needs at least one task")
        if self.intersection not in INTERSECTIONS:
            raise ValueError(f"unknown intersection category {self.intersection!r}")
        if self.similarity not in SIMILARITIES:
            raise ValueError(f"unknown similarity category {self.similarity!r}")
        object.__setattr__(self, "tasks", tuple(self.tasks))

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def unified_dimension(self) -> int:
        return max(t.dimension for t in self.tasks)

    @property
    def category(self) -> tuple[str, str]:
        return self.intersection, self.similarity


def evaluate_task(task: TaskDefinition, x, budget: EvalBudget | None = None) -> np.ndarray:
    """Objective vector ``(f1, f2)`` of unified vector ``x`` on ``task``.

    When ``budget`` is given it is charged one evaluation first;
    :class:`~mteadn.core.BudgetExhausted` propagates if it is spent.
    """
    if budget is not None:
        budget.charge()
    return task.objectives(np.asarray(x, dtype=float))


def true_front_sample(task: TaskDefinition, count: int) -> np.ndarray:
    """``count`` points of the analytic front on a uniform ``f1`` grid."""
    if count < 2:
        raise ValueError("count must be at least 2")
    f1 = np.linspace(0.0, 1.0, count)
    if task.shape == "convex":
        f2 = 1.0 - np.sqrt(f1)
    else:
        f2 = 1.0 - f1**2
    return np.column_stack([f1, f2])


def optimal_decision(task: TaskDefinition, f1: float, unified_dim: int | None = None) -> np.ndarray:
    """A unified vector on the task's Pareto set with first objective ``f1``.

    Coordinates beyond the task's own dimension are filled with 0.5.
    """
    d = task.dimension
    n = d if unified_dim is None else unified_dim
    x = np.full(n, 0.5)
    x[0] = f1
    x[1:d] = task.tail_optimum()
    return x
