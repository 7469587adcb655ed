"""Decomposition-based multitasking with internal and external neighborhoods.

Every task is decomposed into ``N`` ASF subproblems. Each subproblem keeps

* an internal neighborhood: the ``T`` nearest weight vectors of its own task;
* an external neighborhood: an index set into the sub-population of another
  task ``phi``, initially the whole sub-population and later retargeted by
  grey relational analysis whenever an offspring produced from it improves
  subproblems of that task.

Modes
-----
``dual``
    The full algorithm.
``internal-only``
    The external branch is never taken; tasks evolve without exchange.
``external-only``
    The neighborhood branch always uses the external neighborhood, and the
    offspring only ever updates that external neighborhood.
``moead-baseline``
    Single-task MOEA/D with capped replacement, see :func:`run_moead_baseline`.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .core import BudgetExhausted, EvalBudget, RunRecord, child_seed, make_rng
from .decomposition import build_internal_neighborhood, floor_weights, generate_weight_vectors
from .gra import DEFAULT_RHO, argmax_relational, grey_relational_degree
from .metrics import FrontScorer, nondominated_filter
from .problems.tasks import InstanceDefinition, TaskDefinition, true_front_sample
from .variation import VariationParams, reproduce

MODES = ("dual", "internal-only", "external-only", "moead-baseline")
REFERENCE_SIZE = 1000


@dataclass(frozen=True)
class AlgorithmConfig:
    N: int = 100
    T: int = 10
    beta: float = 0.1
    mode: str = "dual"
    n_r: int | None = None
    variation: VariationParams = field(default_factory=VariationParams)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if not 1 <= self.T <= self.N:
            raise ValueError(f"T={self.T} must satisfy 1 <= T <= N={self.N}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.mode == "moead-baseline" and (self.n_r is None or self.n_r < 1):
            raise ValueError("moead-baseline needs n_r >= 1")


PRESETS = {
    "dual": AlgorithmConfig(mode="dual"),
    "internal-only": AlgorithmConfig(mode="internal-only"),
    "external-only": AlgorithmConfig(mode="external-only"),
    "moead-baseline": AlgorithmConfig(mode="moead-baseline", T=20, beta=0.9, n_r=2),
}


def preset(name: str, **overrides) -> AlgorithmConfig:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm preset {name!r}; expected one of {tuple(PRESETS)}") from None
    return replace(base, **overrides) if overrides else base


@dataclass
class TaskState:
    """Per-task part of the multitask state."""

    task: TaskDefinition
    weights: np.ndarray
    inv_weights: np.ndarray
    internal: np.ndarray  # (N, T) indices
    phi: np.ndarray  # (N,) external task index, -1 when K == 1
    external: list  # N index arrays into sub-population phi[i]
    pop: np.ndarray  # (N, D) unified vectors
    objs: np.ndarray  # (N, 2) cached objective vectors
    ideal: np.ndarray


@dataclass
class MultitaskState:
    tasks: list
    budget: EvalBudget
    rng: np.random.Generator
    full_range: np.ndarray
    generation: int = 0
    external_selections: int = 0
    evaluations_per_task: list = field(default_factory=list)

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def N(self) -> int:
        return self.full_range.size


def _draw_other_task(k: int, n_tasks: int, rng: np.random.Generator) -> int:
    if n_tasks < 2:
        return -1
    j = int(rng.integers(n_tasks - 1))
    return j + 1 if j >= k else j


def _evaluate(state: MultitaskState, k: int, x: np.ndarray) -> np.ndarray:
    state.budget.charge()
    state.evaluations_per_task[k] += 1
    return state.tasks[k].task.objectives(x)


def _init_task(task, config, n_tasks, k, dim, rng) -> TaskState:
    weights = generate_weight_vectors(config.N, 2)
    n = config.N
    full = np.arange(n)
    return TaskState(
        task=task,
        weights=weights,
        inv_weights=1.0 / floor_weights(weights),
        internal=build_internal_neighborhood(weights, config.T),
        phi=np.array([_draw_other_task(k, n_tasks, rng) for _ in range(n)], dtype=int),
        external=[full for _ in range(n)],
        pop=rng.random((n, dim)),
        objs=np.empty((n, 2)),
        ideal=np.full(2, np.inf),
    )


def initialize(instance: InstanceDefinition, config: AlgorithmConfig, budget: int, rng) -> MultitaskState:
    """Weights, neighborhoods, random sub-populations and ideal points for every task."""
    k_tasks = instance.n_tasks
    if budget < k_tasks * config.N:
        raise ValueError("budget too small to initialize")
    dim = instance.unified_dimension
    tasks = [_init_task(t, config, k_tasks, k, dim, rng) for k, t in enumerate(instance.tasks)]
    state = MultitaskState(
        tasks=tasks,
        budget=EvalBudget(budget),
        rng=rng,
        full_range=np.arange(config.N),
        evaluations_per_task=[0] * k_tasks,
    )
    for k, ts in enumerate(tasks):
        for i in range(config.N):
            ts.objs[i] = _evaluate(state, k, ts.pop[i])
        ts.ideal = ts.objs.min(axis=0)
    return state


def candidate_set_selection(state: MultitaskState, cur: int, tau: int, beta: float,
                            mode: str = "dual") -> tuple[int, np.ndarray, bool]:
    """Pick the mating pool: whole sub-population, internal or external neighborhood.

    Returns ``(target task, index set, used_external)``.
    """
    rng = state.rng
    if rng.random() >= beta:
        return cur, state.full_range, False
    ts = state.tasks[cur]
    if mode == "internal-only" or state.n_tasks < 2:
        use_internal = True
    elif mode == "external-only":
        use_internal = False
    else:
        use_internal = rng.random() < 0.5
    if use_internal:
        return cur, ts.internal[tau], False
    state.external_selections += 1
    return int(ts.phi[tau]), ts.external[tau], True


def update(state: MultitaskState, cur: int, tar: int, x_hat: np.ndarray, tau: int,
           q: np.ndarray, used_external: bool = False, mode: str = "dual",
           rho: float = DEFAULT_RHO) -> np.ndarray:
    """Evaluate the offspring, replace improved subproblems, retarget the external set.

    Returns the indices of the replaced subproblems. Raises
    :class:`BudgetExhausted` before touching any state if the budget is spent.
    """
    rng = state.rng
    if cur != tar and mode == "dual" and rng.random() < 0.5:
        # bidirectional update: send the offspring back to the current task
        q = state.tasks[cur].internal[tau]
        tar = cur
    f = _evaluate(state, tar, x_hat)
    tt = state.tasks[tar]
    np.minimum(tt.ideal, f, out=tt.ideal)
    z = tt.ideal
    inv_w = tt.inv_weights[q]
    new = (np.abs(f - z) * inv_w).max(axis=1)
    old = (np.abs(tt.objs[q] - z) * inv_w).max(axis=1)
    replaced = q[new < old]
    if replaced.size:
        tt.pop[replaced] = x_hat
        tt.objs[replaced] = f
    if cur != tar:
        cs = state.tasks[cur]
        if replaced.size == 0:
            cs.phi[tau] = _draw_other_task(cur, state.n_tasks, rng)
            cs.external[tau] = state.full_range
        else:
            ref = cs.pop[cs.internal[tau]].mean(axis=0)
            compared = tt.pop[tt.internal[replaced]].mean(axis=1)
            best = argmax_relational(grey_relational_degree(ref, compared, rho))
            cs.external[tau] = tt.internal[replaced[best]]
    return replaced


def run_generation(state: MultitaskState, config: AlgorithmConfig, on_step=None) -> bool:
    """Process every individual of every task once, in shuffled order.

    Replacements are visible immediately to later members of the same
    generation. Returns ``False`` if the budget ran out mid-generation.
    """
    n = config.N
    rng = state.rng
    order = rng.permutation(state.n_tasks * n)
    params = config.variation
    mode = config.mode
    try:
        for p in order:
            cur, tau = divmod(int(p), n)
            tar, q, used_ext = candidate_set_selection(state, cur, tau, config.beta, mode)
            x = state.tasks[cur].pop[tau]
            x_hat = reproduce(x, state.tasks[tar].pop[q], params, rng)
            update(state, cur, tar, x_hat, tau, q, used_ext, mode)
            if on_step is not None:
                on_step(state)
    except BudgetExhausted:
        return False
    state.generation += 1
    return True


def default_scorers(tasks, reference_size: int = REFERENCE_SIZE, hv_ref=(1.0, 1.0),
                    igd_form: str = "printed") -> list:
    return [FrontScorer(true_front_sample(t, reference_size), hv_ref, igd_form) for t in tasks]


class _Checkpointer:
    """Records per-task IGD/HV whenever the evaluation count crosses a multiple of ``interval``."""

    def __init__(self, scorers, interval: int, scale: int = 1, task_offset: int = 0):
        self.scorers = scorers
        self.interval = interval
        self.scale = scale
        self.task_offset = task_offset
        self.rows = []
        self.next_at = None
        self.last = None

    def snapshot(self, consumed: int, objs_per_task):
        evals = consumed * self.scale
        if evals == self.last:
            return
        for k, objs in enumerate(objs_per_task):
            i, h = self.scorers[k].score(objs)
            self.rows.append((evals, k + self.task_offset, i, h))
        self.last = evals
        self.next_at = (consumed // self.interval + 1) * self.interval

    def maybe(self, consumed: int, objs_per_task):
        if consumed >= self.next_at:
            self.snapshot(consumed, objs_per_task)


def run(instance: InstanceDefinition, config: AlgorithmConfig, budget: int, seed: int,
        checkpoint_interval: int = 1000, scorers=None, repetition: int = 0,
        label: str | None = None) -> RunRecord:
    """Run the multitask algorithm until ``budget`` evaluations are spent.

    Checkpoints are taken right after initialization, each time the
    evaluation count crosses a multiple of ``checkpoint_interval``, and at the
    end. Metrics are computed on cached objective vectors, so they cost no
    evaluations.
    """
    if config.mode == "moead-baseline":
        return run_moead_instance(instance, config, budget // instance.n_tasks, seed,
                                  checkpoint_interval, scorers, repetition, label)
    if checkpoint_interval < 1:
        raise ValueError("checkpoint_interval must be positive")
    t0 = time.perf_counter()
    scorers = default_scorers(instance.tasks) if scorers is None else scorers
    rng = make_rng(seed)
    state = initialize(instance, config, budget, rng)
    cp = _Checkpointer(scorers, checkpoint_interval)

    def objs():
        return [ts.objs for ts in state.tasks]

    cp.snapshot(state.budget.consumed, objs())

    def on_step(s):
        if s.budget.consumed >= cp.next_at:
            cp.snapshot(s.budget.consumed, objs())

    while not state.budget.exhausted:
        if not run_generation(state, config, on_step):
            break
    cp.snapshot(state.budget.consumed, objs())
    return RunRecord(
        instance=instance.name,
        algorithm=label or config.mode,
        repetition=repetition,
        seed=int(seed),
        checkpoints=cp.rows,
        fronts=[nondominated_filter(ts.objs) for ts in state.tasks],
        populations=[ts.pop.copy() for ts in state.tasks],
        wall_clock=time.perf_counter() - t0,
    )


@dataclass
class BaselineResult:
    pop: np.ndarray
    objs: np.ndarray
    ideal: np.ndarray
    budget: EvalBudget
    checkpoints: list


def replace_capped(pop, objs, inv_w, ideal, order, x_hat, f, n_r: int) -> np.ndarray:
    """Replace at most ``n_r`` subproblems of ``order`` that ``f`` strictly improves.

    Candidates are tested in the given order; returns the replaced indices.
    """
    w = inv_w[order]
    new = (np.abs(f - ideal) * w).max(axis=1)
    old = (np.abs(objs[order] - ideal) * w).max(axis=1)
    hit = order[new < old][:n_r]
    if hit.size:
        pop[hit] = x_hat
        objs[hit] = f
    return hit


def run_moead_baseline(task: TaskDefinition, config: AlgorithmConfig, budget: int, rng,
                       checkpoint=None) -> BaselineResult:
    """Single-task MOEA/D with DE + PM and at most ``n_r`` replacements per offspring.

    With probability ``beta`` the mating and replacement pool is the
    ``T``-neighborhood, otherwise the whole population. ``checkpoint`` is an
    optional callable ``(consumed, objs)`` invoked after initialization and
    after every evaluation.
    """
    n = config.N
    n_r = config.n_r if config.n_r is not None else PRESETS["moead-baseline"].n_r
    if budget < n:
        raise ValueError("budget too small to initialize")
    weights = generate_weight_vectors(n, 2)
    inv_w = 1.0 / floor_weights(weights)
    hood = build_internal_neighborhood(weights, config.T)
    full = np.arange(n)
    dim = task.dimension
    bud = EvalBudget(budget)
    pop = rng.random((n, dim))
    objs = np.empty((n, 2))
    for i in range(n):
        bud.charge()
        objs[i] = task.objectives(pop[i])
    ideal = objs.min(axis=0)
    if checkpoint is not None:
        checkpoint(bud.consumed, objs)
    params = config.variation
    try:
        while not bud.exhausted:
            for i in rng.permutation(n):
                pool = hood[i] if rng.random() < config.beta else full
                x_hat = reproduce(pop[i], pop[pool], params, rng)
                bud.charge()
                f = task.objectives(x_hat)
                np.minimum(ideal, f, out=ideal)
                replace_capped(pop, objs, inv_w, ideal, rng.permutation(pool), x_hat, f, n_r)
                if checkpoint is not None:
                    checkpoint(bud.consumed, objs)
    except BudgetExhausted:
        pass
    return BaselineResult(pop=pop, objs=objs, ideal=ideal, budget=bud, checkpoints=[])


def run_moead_instance(instance: InstanceDefinition, config: AlgorithmConfig, budget_per_task: int,
                       seed: int, checkpoint_interval: int = 1000, scorers=None,
                       repetition: int = 0, label: str | None = None) -> RunRecord:
    """Run the baseline independently on each task with an equal budget share.

    Checkpoint evaluation counts are reported as ``K * per-task evaluations``
    so traces line up with multitask runs on the same total budget.
    """
    t0 = time.perf_counter()
    k_tasks = instance.n_tasks
    scorers = default_scorers(instance.tasks) if scorers is None else scorers
    rows, fronts, pops = [], [], []
    for k, task in enumerate(instance.tasks):
        rng = make_rng(child_seed(seed, k))
        cp = _Checkpointer([scorers[k]], checkpoint_interval, scale=k_tasks, task_offset=k)
        cp.next_at = 0

        def hook(consumed, objs, cp=cp):
            if consumed >= cp.next_at:
                cp.snapshot(consumed, [objs])

        res = run_moead_baseline(task, config, budget_per_task, rng, hook)
        cp.snapshot(res.budget.consumed, [res.objs])
        rows.extend(cp.rows)
        fronts.append(nondominated_filter(res.objs))
        pops.append(res.pop.copy())
    rows.sort(key=lambda r: (r[0], r[1]))
    return RunRecord(
        instance=instance.name,
        algorithm=label or config.mode,
        repetition=repetition,
        seed=int(seed),
        checkpoints=rows,
        fronts=fronts,
        populations=pops,
        wall_clock=time.perf_counter() - t0,
    )
