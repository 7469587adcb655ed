"""Reading and writing transform data and instance manifests.

Transform file (plain text, whitespace separated, ``#`` starts a comment)::

    # shift, D-1 values
    s_1 s_2 ... s_{D-1}
    # rotation, D-1 rows of D-1 values
    m_11 ... m_1,D-1
    ...

Instance manifest (INI)::

    [instance]
    name = CIHS
    intersection = CI
    similarity = HS

    [task1]
    base = sphere
    shape = convex
    dimension = 10
    tail_lower = -100
    tail_upper = 100
    transform = CIHS_task1.txt

``tail_lower``/``tail_upper`` give the bounds of variables 2..D, either one
scalar or ``D-1`` values. Variable 1 always spans ``[0, 1]``. The transform
path is resolved relative to the manifest.
"""
from __future__ import annotations

import configparser
from pathlib import Path

import numpy as np

from ..core import TaskSpace
from .tasks import InstanceDefinition, TaskDefinition

ORTHOGONALITY_TOL = 1e-6


class TransformDataError(ValueError):
    """Invalid transform file. ``check`` names the failed validation."""

    def __init__(self, check: str, detail: str = ""):
        super().__init__(f"{check}: {detail}" if detail else check)
        self.check = check


def _data_rows(text: str) -> list[list[str]]:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    return rows


def parse_transform_data(text: str, expected_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Parse transform text for a task of dimension ``expected_dim``.

    The shift and rotation act on the ``expected_dim - 1`` tail variables.
    """
    rows = _data_rows(text)
    if not rows:
        raise TransformDataError("malformed file", "no data rows")
    try:
        values = [[float(v) for v in row] for row in rows]
    except ValueError as exc:
        raise TransformDataError("malformed file", str(exc)) from None
    n = expected_dim - 1
    shift = np.array(values[0])
    matrix_rows = values[1:]
    if len(shift) != n or len(matrix_rows) != n or any(len(r) != n for r in matrix_rows):
        raise TransformDataError(
            "dimension mismatch",
            f"expected shift of {n} values and a {n}x{n} matrix, got shift of {len(shift)} "
            f"and {len(matrix_rows)} rows",
        )
    rot = np.array(matrix_rows)
    if not (np.all(np.isfinite(shift)) and np.all(np.isfinite(rot))):
        raise TransformDataError("malformed file", "non-finite value")
    if not np.allclose(rot @ rot.T, np.eye(n), rtol=0.0, atol=ORTHOGONALITY_TOL):
        raise TransformDataError("non-orthogonal matrix")
    return shift, rot


def load_transform_data(path, expected_dim: int) -> tuple[np.ndarray, np.ndarray]:
    return parse_transform_data(Path(path).read_text(encoding="utf-8"), expected_dim)


def format_transform_data(shift: np.ndarray, rotation: np.ndarray, header: str = "") -> str:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines.append("# shift")
    lines.append(" ".join(repr(float(v)) for v in shift))
    lines.append("# rotation rows")
    for row in rotation:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _bounds(raw: str, n: int, key: str) -> np.ndarray:
    vals = [float(v) for v in raw.replace(",", " ").split()]
    if len(vals) == 1:
        return np.full(n, vals[0])
    if len(vals) != n:
        raise ValueError(f"{key}: expected 1 or {n} values, got {len(vals)}")
    return np.array(vals)


def load_instance(path) -> InstanceDefinition:
    """Build an :class:`InstanceDefinition` from an INI manifest."""
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    if not cp.has_section("instance"):
        raise ValueError(f"{path}: missing [instance] section")
    head = cp["instance"]
    task_sections = sorted(
        (s for s in cp.sections() if s.startswith("task")), key=lambda s: int(s[4:])
    )
    if not task_sections:
        raise ValueError(f"{path}: no [taskN] sections")
    tasks = []
    for sec in task_sections:
        t = cp[sec]
        dim = t.getint("dimension")
        lower = np.concatenate([[0.0], _bounds(t["tail_lower"], dim - 1, "tail_lower")])
        upper = np.concatenate([[1.0], _bounds(t["tail_upper"], dim - 1, "tail_upper")])
        shift, rot = load_transform_data(path.parent / t["transform"], dim)
        tasks.append(
            TaskDefinition(
                name=f"{head['name']}{sec[4:]}",
                space=TaskSpace(lower, upper),
                shape=t.get("shape", "convex"),
                base=t["base"],
                shift=shift,
                rotation=rot,
            )
        )
    return InstanceDefinition(
        name=head["name"],
        tasks=tuple(tasks),
        intersection=head["intersection"],
        similarity=head["similarity"],
    )
