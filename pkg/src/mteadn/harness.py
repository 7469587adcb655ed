"""Experiment orchestration: configuration, seeded repetitions, CSV output, summaries.

Config file (INI, UTF-8)::

    [experiment]
    instances = CIHS, CIMS, path/to/custom.ini
    algorithms = dual, internal-only, moead-baseline
    repetitions = 21
    root_seed = 0
    budget_per_task = 50000
    checkpoint_interval = 1000
    output_dir = results
    workers = 1

    [algorithm.dual-beta02]      ; optional, one section per label
    preset = dual                ; defaults to the label itself
    beta = 0.2

    [metrics]
    reference_size = 1000
    hv_reference = 1.0, 1.0
    igd_form = printed

Only ``instances`` and ``algorithms`` are required. Algorithm sections accept
``preset, N, T, beta, n_r, F, Cr, eta_m, p_m``. Unknown sections or keys
are errors.
"""
from __future__ import annotations

import configparser
import csv
import hashlib
import json
import logging
import re
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .algorithm import PRESETS, AlgorithmConfig, default_scorers, run
from .core import RunRecord, child_seed
from .metrics import IGD_FORMS, friedman_average_rank
from .problems import INSTANCE_NAMES, SUITE_VERSION, load_builtin, load_instance

log = logging.getLogger(__name__)

FLOAT_FMT = "{:.16e}"

EXPERIMENT_KEYS = {
    "instances", "algorithms", "repetitions", "root_seed", "budget_per_task",
    "checkpoint_interval", "output_dir", "workers",
}
ALGORITHM_KEYS = {"preset", "n", "t", "beta", "n_r", "f", "cr", "eta_m", "p_m"}
METRIC_KEYS = {"reference_size", "hv_reference", "igd_form"}


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = ""
        if key is not None:
            where = f"key '{key}'"
            if line is not None:
                where += f" (line {line})"
            where += ": "
        super().__init__(where + message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class MetricOptions:
    reference_size: int = 1000
    hv_reference: tuple = (1.0, 1.0)
    igd_form: str = "printed"


@dataclass
class ExperimentConfig:
    instances: list
    algorithms: dict  # label -> AlgorithmConfig, in run order
    repetitions: int = 21
    root_seed: int = 0
    budget_per_task: int = 50000
    checkpoint_interval: int = 1000
    output_dir: str = "results"
    workers: int = 1
    metrics: MetricOptions = field(default_factory=MetricOptions)

    def digest(self) -> str:
        payload = {
            "instances": list(self.instances),
            "algorithms": {k: asdict(v) for k, v in self.algorithms.items()},
            "repetitions": self.repetitions,
            "root_seed": self.root_seed,
            "budget_per_task": self.budget_per_task,
            "checkpoint_interval": self.checkpoint_interval,
            "metrics": asdict(self.metrics),
        }
        blob = json.dumps(payload, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _key_lines(text: str) -> dict:
    """Map ``(section, key)`` and ``(section, None)`` to 1-based line numbers."""
    where = {}
    section = None
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip()
            where.setdefault((section, None), n)
            continue
        m = re.match(r"([^=:]+?)\s*[=:]", s)
        if m and section is not None:
            where.setdefault((section, m.group(1).strip().lower()), n)
    return where


def _split_list(raw: str) -> list[str]:
    return [p for p in (x.strip() for x in raw.replace("\n", ",").split(",")) if p]


def resolve_instance(entry: str, base_dir: Path | None = None):
    if entry in INSTANCE_NAMES:
        return load_builtin(entry)
    path = Path(entry)
    if base_dir is not None and not path.is_absolute():
        path = base_dir / path
    if not path.exists():
        raise FileNotFoundError(f"unknown instance {entry!r}: not a built-in name or existing file")
    return load_instance(path)


def parse_config_text(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    lines = _key_lines(text)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unparseable config: {exc}") from None

    def err(section, key, message):
        return ConfigError(message, key, lines.get((section, key.lower() if key else None)))

    def get(section, key, conv, check=None, message=""):
        raw = cp[section][key]
        try:
            value = conv(raw)
        except ValueError:
            raise err(section, key, f"invalid value {raw!r}") from None
        if check is not None and not check(value):
            raise err(section, key, message or f"invalid value {raw!r}")
        return value

    for sec in cp.sections():
        if sec not in ("experiment", "metrics") and not sec.startswith("algorithm."):
            raise ConfigError(f"unknown section [{sec}]", sec, lines.get((sec, None)))
    if not cp.has_section("experiment"):
        raise ConfigError("missing [experiment] section", "experiment")
    exp = cp["experiment"]
    for key in exp:
        if key not in EXPERIMENT_KEYS:
            raise err("experiment", key, "unknown key")
    for key in ("instances", "algorithms"):
        if key not in exp or not _split_list(exp[key]):
            raise ConfigError("missing required key", key, lines.get(("experiment", key)))

    kw = {}
    if "repetitions" in exp:
        kw["repetitions"] = get("experiment", "repetitions", int, lambda v: v >= 1, "repetitions must be ≥ 1")
    if "root_seed" in exp:
        kw["root_seed"] = get("experiment", "root_seed", int, lambda v: 0 <= v < 2**64,
                              "root_seed must be a 64-bit non-negative integer")
    if "budget_per_task" in exp:
        kw["budget_per_task"] = get("experiment", "budget_per_task", int, lambda v: v >= 1,
                                    "budget_per_task must be positive")
    if "checkpoint_interval" in exp:
        kw["checkpoint_interval"] = get("experiment", "checkpoint_interval", int, lambda v: v >= 1,
                                        "checkpoint_interval must be positive")
    if "output_dir" in exp:
        kw["output_dir"] = exp["output_dir"].strip()
    if "workers" in exp:
        kw["workers"] = get("experiment", "workers", int, lambda v: v >= 1, "workers must be ≥ 1")

    metrics = MetricOptions()
    if cp.has_section("metrics"):
        m = cp["metrics"]
        mk = {}
        for key in m:
            if key not in METRIC_KEYS:
                raise err("metrics", key, "unknown key")
        if "reference_size" in m:
            mk["reference_size"] = get("metrics", "reference_size", int, lambda v: v >= 2,
                                       "reference_size must be ≥ 2")
        if "hv_reference" in m:
            mk["hv_reference"] = get("metrics", "hv_reference",
                                     lambda r: tuple(float(v) for v in _split_list(r)),
                                     lambda v: len(v) == 2, "hv_reference needs 2 values")
        if "igd_form" in m:
            mk["igd_form"] = get("metrics", "igd_form", str.strip, lambda v: v in IGD_FORMS,
                                 f"igd_form must be one of {IGD_FORMS}")
        metrics = MetricOptions(**mk)

    algorithms = {}
    for label in _split_list(exp["algorithms"]):
        sec = f"algorithm.{label}"
        if label in algorithms:
            raise err("experiment", "algorithms", f"duplicate algorithm {label!r}")
        if cp.has_section(sec):
            a = cp[sec]
            for key in a:
                if key not in ALGORITHM_KEYS:
                    raise err(sec, key, "unknown key")
            base = a.get("preset", label).strip()
        else:
            a, base = {}, label
        if base not in PRESETS:
            key = "preset" if "preset" in a else "algorithms"
            raise err(sec if key == "preset" else "experiment", key,
                      f"unknown algorithm preset {base!r}; expected one of {tuple(PRESETS)}")
        cfg = PRESETS[base]
        over, vover = {}, {}
        for key, name, conv, target in [
            ("n", "N", int, over), ("t", "T", int, over), ("beta", "beta", float, over),
            ("n_r", "n_r", int, over), ("f", "F", float, vover), ("cr", "Cr", float, vover),
            ("eta_m", "eta_m", float, vover), ("p_m", "p_m", float, vover),
        ]:
            if key in a:
                target[name] = get(sec, key, conv)
        try:
            if vover:
                over["variation"] = replace(cfg.variation, **vover)
            cfg = replace(cfg, **over)
        except ValueError as exc:
            # blame the key the validator names first, else the first override
            named = [k for k in (*vover, *over) if re.match(rf"{k}\b", str(exc))]
            bad = (named or [next(iter(vover or over))])[0].lower()
            raise err(sec, bad, str(exc)) from None
        algorithms[label] = cfg
    kw["algorithms"] = algorithms

    instances = _split_list(exp["instances"])
    loaded = []
    for entry in instances:
        try:
            loaded.append(resolve_instance(entry, base_dir))
        except (FileNotFoundError, ValueError) as exc:
            raise err("experiment", "instances", str(exc)) from None
    config = ExperimentConfig(instances=instances, **kw, metrics=metrics)
    for inst in loaded:
        for label, cfg in algorithms.items():
            need = inst.n_tasks * cfg.N
            if config.checkpoint_interval < need:
                raise ConfigError(
                    f"checkpoint_interval must be ≥ K·N = {need} ({inst.name}, {label})",
                    "checkpoint_interval", lines.get(("experiment", "checkpoint_interval")),
                )
            if config.budget_per_task * inst.n_tasks < need:
                raise ConfigError(f"budget too small to initialize ({inst.name}, {label})",
                                  "budget_per_task", lines.get(("experiment", "budget_per_task")))
    return config


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), base_dir=path.parent)


# -- persistence ---------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return FLOAT_FMT.format(float(v))


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def _read_csv(path: Path) -> tuple[list, list]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def run_dir(root, record: RunRecord) -> Path:
    return Path(root) / "runs" / record.instance / record.algorithm / f"rep{record.repetition}"


def write_run(root, record: RunRecord, meta: dict) -> Path:
    """Persist one run: convergence trace, final fronts, final populations, metadata."""
    d = run_dir(root, record)
    d.mkdir(parents=True, exist_ok=True)
    _write_csv(d / "convergence.csv", ["evals", "task", "igd", "hv"],
               [(int(e), int(k) + 1, i, h) for e, k, i, h in record.checkpoints])
    for k, front in enumerate(record.fronts, start=1):
        _write_csv(d / f"front_task{k}.csv", ["f1", "f2"], front.tolist())
    for k, pop in enumerate(record.populations, start=1):
        _write_csv(d / f"pop_task{k}.csv", [f"x{j}" for j in range(1, pop.shape[1] + 1)], pop.tolist())
    fields = {
        "instance": record.instance,
        "algorithm": record.algorithm,
        "repetition": record.repetition,
        "seed": record.seed,
        "wall_clock_seconds": f"{record.wall_clock:.3f}",
        **meta,
    }
    _write_csv(d / "meta.csv", list(fields), [[str(v) for v in fields.values()]])
    return d


def read_run(d) -> tuple[RunRecord, dict]:
    d = Path(d)
    header, meta_rows = _read_csv(d / "meta.csv")
    meta = dict(zip(header, meta_rows[0]))
    _, conv = _read_csv(d / "convergence.csv")
    checkpoints = [(int(e), int(k) - 1, float(i), float(h)) for e, k, i, h in conv]
    fronts, pops = [], []
    k = 1
    while (d / f"front_task{k}.csv").exists():
        _, rows = _read_csv(d / f"front_task{k}.csv")
        fronts.append(np.array(rows, dtype=float).reshape(-1, 2))
        _, rows = _read_csv(d / f"pop_task{k}.csv")
        pops.append(np.array(rows, dtype=float))
        k += 1
    record = RunRecord(
        instance=meta["instance"],
        algorithm=meta["algorithm"],
        repetition=int(meta["repetition"]),
        seed=int(meta["seed"]),
        checkpoints=checkpoints,
        fronts=fronts,
        populations=pops,
        wall_clock=float(meta["wall_clock_seconds"]),
    )
    return record, meta


def read_runs(root) -> list[RunRecord]:
    """All persisted runs under ``root``, in experiment order."""
    found = []
    for meta_path in sorted(Path(root).glob("runs/*/*/rep*/meta.csv")):
        record, meta = read_run(meta_path.parent)
        key = (int(meta.get("instance_index", 0)), int(meta.get("algorithm_index", 0)), record.repetition)
        found.append((key, record))
    found.sort(key=lambda item: item[0])
    return [r for _, r in found]


# -- execution -----------------------------------------------------------------

@dataclass(frozen=True)
class _Job:
    instance: object
    label: str
    config: AlgorithmConfig
    repetition: int
    seed: int
    budget: int
    checkpoint_interval: int
    metrics: MetricOptions
    output_dir: str
    meta: dict


def _execute(job: _Job) -> RunRecord:
    scorers = default_scorers(job.instance.tasks, job.metrics.reference_size,
                              job.metrics.hv_reference, job.metrics.igd_form)
    record = run(job.instance, job.config, job.budget, job.seed, job.checkpoint_interval,
                 scorers, repetition=job.repetition, label=job.label)
    write_run(job.output_dir, record, job.meta)
    return record


def _check_writable(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=path):
            pass
    except OSError as exc:
        raise OSError(f"output directory {path} is not writable: {exc}") from None


def plan_jobs(config: ExperimentConfig, base_dir: Path | None = None) -> list[_Job]:
    digest = config.digest()
    jobs = []
    for ii, entry in enumerate(config.instances):
        inst = resolve_instance(entry, base_dir)
        budget = config.budget_per_task * inst.n_tasks
        for ai, (label, cfg) in enumerate(config.algorithms.items()):
            for rep in range(1, config.repetitions + 1):
                meta = {
                    "instance_index": ii,
                    "algorithm_index": ai,
                    "config_hash": digest,
                    "igd_form": config.metrics.igd_form,
                    "suite": f"{SUITE_VERSION} (artifact-defined)" if entry in INSTANCE_NAMES else entry,
                }
                jobs.append(_Job(
                    instance=inst, label=label, config=cfg, repetition=rep,
                    seed=child_seed(config.root_seed, inst.name, label, rep),
                    budget=budget, checkpoint_interval=config.checkpoint_interval,
                    metrics=config.metrics, output_dir=str(config.output_dir), meta=meta,
                ))
    return jobs


def run_experiment(config: ExperimentConfig, workers: int | None = None,
                   base_dir: Path | None = None) -> list[RunRecord]:
    """Execute every (instance, algorithm, repetition) and write runs plus summaries."""
    out = Path(config.output_dir)
    _check_writable(out)
    jobs = plan_jobs(config, base_dir)
    workers = workers or config.workers
    log.info("running %d jobs with %d worker(s) into %s", len(jobs), workers, out)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_execute, jobs))
    else:
        records = []
        for job in jobs:
            records.append(_execute(job))
            log.info("done %s/%s rep%d", job.instance.name, job.label, job.repetition)
    write_summaries(out, summarize(records, config.metrics.igd_form))
    return records


# -- summaries -----------------------------------------------------------------

def _ordered(values):
    seen = []
    for v in values:
        if v not in seen:
            seen.append(v)
    return seen


def _marks(means, higher_better: bool) -> tuple[str, str]:
    keyed = [(-m if higher_better else m, i) for i, m in enumerate(means)]
    keyed.sort()
    best = keyed[0][1]
    second = keyed[1][1] if len(keyed) > 1 else None
    return best, second


def median_run_index(values) -> int:
    """Position of the lower-median value; ties go to the earlier position."""
    order = sorted(range(len(values)), key=lambda i: (values[i], i))
    return order[(len(values) - 1) // 2]


def summarize(records, igd_form: str = "printed") -> dict:
    """Tables of final-metric statistics, average ranks and median-run traces.

    Standard deviations are population (``ddof=0``) deviations. Returns a
    mapping ``file name -> (header, rows)``.
    """
    records = list(records)
    if not records:
        raise ValueError("no run records to summarize")
    instances = _ordered(r.instance for r in records)
    algorithms = _ordered(r.algorithm for r in records)
    groups = {}
    for r in records:
        key = (r.instance, r.algorithm, r.repetition)
        if key in groups:
            raise ValueError(f"duplicate run record {key}")
        groups[key] = r
    n_tasks = {}
    for r in records:
        n = len(r.fronts)
        if n_tasks.setdefault(r.instance, n) != n:
            raise ValueError(f"inconsistent task count for {r.instance}")
    reps = {}
    for inst in instances:
        for alg in algorithms:
            rs = sorted(k[2] for k in groups if k[0] == inst and k[1] == alg)
            if not rs:
                raise ValueError(f"missing runs for ({inst}, {alg})")
            reps[inst, alg] = rs

    tables = {}
    medians = {"igd": [], "hv": []}
    trace_rows = []
    for metric, col, higher in (("igd", 0, False), ("hv", 1, True)):
        header = ["instance", "task"]
        for alg in algorithms:
            header += [f"{alg}_mean", f"{alg}_std_population", f"{alg}_median"]
        header += ["best", "second_best"]
        if metric == "igd":
            header.append("igd_form")
        rows = []
        for inst in instances:
            for k in range(n_tasks[inst]):
                row = [inst, k + 1]
                means, meds = [], []
                for alg in algorithms:
                    vals = np.array([groups[inst, alg, rep].final_metrics(k)[col] for rep in reps[inst, alg]])
                    means.append(float(vals.mean()))
                    meds.append(float(np.median(vals)))
                    row += [float(vals.mean()), float(vals.std(ddof=0)), float(np.median(vals))]
                best, second = _marks(means, higher)
                row += [algorithms[best], algorithms[second] if second is not None else ""]
                if metric == "igd":
                    row.append(igd_form)
                rows.append(row)
                medians[metric].append(meds)
        tables[f"{metric}.csv"] = (header, rows)

    if len(algorithms) >= 2:
        igd_rank = friedman_average_rank(np.array(medians["igd"]).T, better="lower")
        hv_rank = friedman_average_rank(np.array(medians["hv"]).T, better="higher")
        blocks = len(medians["igd"])
        tables["friedman.csv"] = (
            ["algorithm", "igd_average_rank", "hv_average_rank", "blocks"],
            [[alg, float(igd_rank[i]), float(hv_rank[i]), blocks] for i, alg in enumerate(algorithms)],
        )

    for inst in instances:
        for alg in algorithms:
            for k in range(n_tasks[inst]):
                runs = [groups[inst, alg, rep] for rep in reps[inst, alg]]
                finals = [r.final_metrics(k)[0] for r in runs]
                chosen = runs[median_run_index(finals)]
                for e, task, i, h in chosen.checkpoints:
                    if task == k:
                        trace_rows.append([inst, k + 1, alg, chosen.repetition, int(e), i, h])
    tables["median_convergence.csv"] = (
        ["instance", "task", "algorithm", "repetition", "evals", "igd", "hv"], trace_rows)
    return tables


def write_summaries(root, tables: dict) -> Path:
    d = Path(root) / "summary"
    d.mkdir(parents=True, exist_ok=True)
    for name, (header, rows) in tables.items():
        _write_csv(d / name, header, rows)
    return d


def summarize_directory(root) -> dict:
    """Re-derive and rewrite summaries from the run files under ``root``."""
    records = read_runs(root)
    if not records:
        raise ValueError(f"no runs found under {root}")
    metas = (read_run(p.parent)[1] for p in Path(root).glob("runs/*/*/rep*/meta.csv"))
    forms = {m.get("igd_form", "printed") for m in metas}
    if len(forms) > 1:
        raise ValueError(f"runs mix IGD forms {sorted(forms)}")
    tables = summarize(records, forms.pop())
    write_summaries(root, tables)
    return tables


__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "MetricOptions",
    "parse_config",
    "parse_config_text",
    "read_run",
    "read_runs",
    "run_experiment",
    "summarize",
    "summarize_directory",
    "write_run",
    "write_summaries",
]
