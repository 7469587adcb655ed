"""Built-in desk-scale suite of nine two-task instances.

The constants are artifact-defined, not the constants of any published
benchmark. They are generated once by :func:`generate_suite_files` and
stamped under ``mteadn/data/desk_v1``; :func:`build_builtin_suite` only
reads the stamped files, so external data in the same format is a drop-in
replacement.

Category semantics, in unified-space coordinates of the tail optimum:

* CI: both tasks share the same optimum.
* PI: the first ``(D-1)//2`` tail coordinates agree, the rest differ.
* NI: every tail coordinate differs by at least ``MIN_SEPARATION``.

HS pairs use the same base function and rotation; MS the same base
function with different rotations; LS different base functions and
rotations.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .io import format_transform_data, load_instance
from .tasks import InstanceDefinition

SUITE_VERSION = "desk-v1"
DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "desk_v1"
GENERATOR_SEED = 20230417
DIMENSION = 10
MIN_SEPARATION = 0.1

INSTANCE_NAMES = ("CIHS", "CIMS", "CILS", "PIHS", "PIMS", "PILS", "NIHS", "NIMS", "NILS")

TAIL_BOUNDS = {
    "sphere": (-100.0, 100.0),
    "rosenbrock": (-5.0, 5.0),
    "ackley": (-32.0, 32.0),
    "rastrigin": (-5.0, 5.0),
    "griewank": (-100.0, 100.0),
    "meanabs": (-100.0, 100.0),
}

# (task 1 base, task 2 base, task 1 shape, task 2 shape)
PAIRINGS = {
    "CIHS": ("sphere", "sphere", "convex", "convex"),
    "CIMS": ("ackley", "ackley", "convex", "concave"),
    "CILS": ("rastrigin", "meanabs", "convex", "convex"),
    "PIHS": ("rosenbrock", "rosenbrock", "convex", "convex"),
    "PIMS": ("griewank", "griewank", "convex", "convex"),
    "PILS": ("ackley", "sphere", "convex", "convex"),
    "NIHS": ("rastrigin", "rastrigin", "convex", "convex"),
    "NIMS": ("sphere", "sphere", "concave", "convex"),
    "NILS": ("griewank", "rosenbrock", "convex", "convex"),
}


def random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix from the QR factors of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def _displaced(c: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Move every coordinate of ``c`` by 0.15-0.3, staying inside [0.05, 0.95]."""
    step = rng.uniform(0.15, 0.3, size=c.size)
    up = c + step
    down = c - step
    return np.where(up <= 0.95, up, down)


def _tail_optima(intersection: str, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    c1 = rng.uniform(0.25, 0.75, size=n)
    if intersection == "CI":
        return c1, c1.copy()
    c2 = _displaced(c1, rng)
    if intersection == "PI":
        half = n // 2
        c2[:half] = c1[:half]
    return c1, c2


def generate_suite_files(out_dir=DATA_DIR, seed: int = GENERATOR_SEED) -> list[Path]:
    """Write the manifests and transform files of the built-in suite."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.Generator(np.random.PCG64(seed))
    n = DIMENSION - 1
    written = []
    for name in INSTANCE_NAMES:
        inter, sim = name[:2], name[2:]
        base1, base2, shape1, shape2 = PAIRINGS[name]
        c1, c2 = _tail_optima(inter, n, rng)
        rot1 = random_rotation(n, rng)
        rot2 = rot1.copy() if sim == "HS" else random_rotation(n, rng)
        lines = [
            f"# {SUITE_VERSION} built-in instance (artifact-defined constants)",
            "[instance]",
            f"name = {name}",
            f"intersection = {inter}",
            f"similarity = {sim}",
        ]
        for k, (base, shape, c, rot) in enumerate(
            [(base1, shape1, c1, rot1), (base2, shape2, c2, rot2)], start=1
        ):
            lo, hi = TAIL_BOUNDS[base]
            shift = lo + (hi - lo) * c
            fname = f"{name}_task{k}.txt"
            (out_dir / fname).write_text(
                format_transform_data(shift, rot, header=f"{SUITE_VERSION} {name} task {k}"),
                encoding="utf-8",
            )
            written.append(out_dir / fname)
            lines += [
                "",
                f"[task{k}]",
                f"base = {base}",
                f"shape = {shape}",
                f"dimension = {DIMENSION}",
                f"tail_lower = {lo!r}",
                f"tail_upper = {hi!r}",
                f"transform = {fname}",
            ]
        manifest = out_dir / f"{name}.ini"
        manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(manifest)
    version = out_dir / "VERSION"
    version.write_text(
        f"{SUITE_VERSION}\ngenerator_seed = {seed}\n"
        "artifact-defined desk-scale constants; not a published benchmark\n",
        encoding="utf-8",
    )
    written.append(version)
    return written


def builtin_instance_path(name: str) -> Path:
    if name not in INSTANCE_NAMES:
        raise KeyError(f"unknown built-in instance {name!r}")
    return DATA_DIR / f"{name}.ini"


def load_builtin(name: str) -> InstanceDefinition:
    return load_instance(builtin_instance_path(name))


def build_builtin_suite() -> list[InstanceDefinition]:
    return [load_builtin(name) for name in INSTANCE_NAMES]


def validate_suite(instances=None) -> list[str]:
    """Check the category semantics against the stamped constants.

    Returns a list of violation messages (empty when the suite is valid).
    """
    instances = build_builtin_suite() if instances is None else instances
    problems = []
    names = [inst.name for inst in instances]
    if len(set(names)) != len(names):
        problems.append("duplicate instance names")
    for inst in instances:
        if inst.n_tasks != 2:
            problems.append(f"{inst.name}: expected 2 tasks")
            continue
        t1, t2 = inst.tasks
        o1, o2 = t1.tail_optimum(), t2.tail_optimum()
        gap = np.abs(o1 - o2)
        half = o1.size // 2
        if inst.intersection == "CI" and gap.max() > 1e-12:
            problems.append(f"{inst.name}: CI optima differ by {gap.max():.3g}")
        if inst.intersection == "PI":
            if gap[:half].max() > 1e-12:
                problems.append(f"{inst.name}: PI shared coordinates differ")
            if gap[half:].min() < MIN_SEPARATION:
                problems.append(f"{inst.name}: PI free coordinates closer than {MIN_SEPARATION}")
        if inst.intersection == "NI" and gap.min() < MIN_SEPARATION:
            problems.append(f"{inst.name}: NI optima closer than {MIN_SEPARATION}")
        same_rot = np.array_equal(t1.rotation, t2.rotation)
        if inst.similarity == "HS" and not (t1.base == t2.base and same_rot):
            problems.append(f"{inst.name}: HS needs same base and rotation")
        if inst.similarity == "MS" and not (t1.base == t2.base and not same_rot):
            problems.append(f"{inst.name}: MS needs same base, different rotation")
        if inst.similarity == "LS" and (t1.base == t2.base or same_rot):
            problems.append(f"{inst.name}: LS needs different base and rotation")
        for t in inst.tasks:
            opt = t.tail_optimum()
            if opt.min() < 0.0 or opt.max() > 1.0:
                problems.append(f"{t.name}: optimum outside the unified box")
    return problems
