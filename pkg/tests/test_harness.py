import math
import os
import shutil

import numpy as np
import pytest

from mteadn.algorithm import preset
from mteadn.core import RunRecord
from mteadn.harness import (
    ConfigError,
    _execute,
    _read_csv,
    median_run_index,
    parse_config,
    parse_config_text,
    plan_jobs,
    read_run,
    read_runs,
    run_experiment,
    summarize,
    summarize_directory,
)
from mteadn.metrics import FrontScorer
from mteadn.problems import load_builtin, true_front_sample
from mteadn.problems.suite import DATA_DIR

MINIMAL = "[experiment]\ninstances = CIHS\nalgorithms = dual\n"


def small_config(tmp_path, extra="", instances="CIHS, NILS", algorithms="dual, internal-only, moead-baseline"):
    text = f"""
[experiment]
instances = {instances}
algorithms = {algorithms}
repetitions = 2
root_seed = 11
budget_per_task = 300
checkpoint_interval = 100
output_dir = {tmp_path / 'out'}

[algorithm.dual]
N = 20
T = 4

[algorithm.internal-only]
N = 20
T = 4

[algorithm.moead-baseline]
N = 20
T = 4
{extra}
"""
    return parse_config_text(text)


# -- parsing -------------------------------------------------------------------

def test_minimal_config_gets_defaults():
    cfg = parse_config_text(MINIMAL)
    assert cfg.instances == ["CIHS"]
    assert cfg.algorithms == {"dual": preset("dual")}
    assert (cfg.repetitions, cfg.root_seed, cfg.budget_per_task) == (21, 0, 50000)
    assert (cfg.checkpoint_interval, cfg.output_dir, cfg.workers) == (1000, "results", 1)
    assert cfg.metrics.reference_size == 1000
    assert cfg.metrics.hv_reference == (1.0, 1.0)
    assert cfg.metrics.igd_form == "printed"


def test_repetitions_zero_names_key_and_line():
    with pytest.raises(ConfigError, match="repetitions must be ≥ 1") as info:
        parse_config_text(MINIMAL + "repetitions = 0\n")
    assert info.value.key == "repetitions" and info.value.line == 4
    assert "line 4" in str(info.value)


@pytest.mark.parametrize(
    "text, key",
    [
        (MINIMAL + "colour = blue\n", "colour"),
        (MINIMAL + "budget_per_task = lots\n", "budget_per_task"),
        ("[experiment]\ninstances = CIHS\n", "algorithms"),
        (MINIMAL + "[algorithm.dual]\nbeta = 2\n", "beta"),
        (MINIMAL + "[algorithm.dual]\nwidth = 2\n", "width"),
        (MINIMAL + "[metrics]\nigd_form = squared\n", "igd_form"),
        (MINIMAL + "checkpoint_interval = 150\n", "checkpoint_interval"),
        ("[experiment]\ninstances = NOPE\nalgorithms = dual\n", "instances"),
        ("[experiment]\ninstances = CIHS\nalgorithms = nsga\n", "algorithms"),
        (MINIMAL + "[plots]\nx = 1\n", "plots"),
    ],
)
def test_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as info:
        parse_config_text(text)
    assert info.value.key == key
    assert f"key '{key}'" in str(info.value)


def test_error_line_points_at_offending_key():
    text = MINIMAL + "\n[algorithm.dual]\nN = 20\nT = 40\n"
    with pytest.raises(ConfigError) as info:
        parse_config_text(text)
    assert info.value.key == "t" and info.value.line == 7


def test_full_protocol_config_accepted():
    cfg = parse_config_text(
        "[experiment]\ninstances = CIHS, CIMS, CILS, PIHS, PIMS, PILS, NIHS, NIMS, NILS\n"
        "algorithms = dual, internal-only, external-only, moead-baseline\n"
        "repetitions = 21\nbudget_per_task = 50000\n"
    )
    assert cfg.repetitions == 21 and cfg.budget_per_task == 50000 and len(cfg.instances) == 9


def test_algorithm_section_overrides_and_labels():
    cfg = parse_config_text(
        "[experiment]\ninstances = CIHS\nalgorithms = dual, b2\n"
        "[algorithm.b2]\npreset = dual\nbeta = 0.2\nF = 0.7\np_m = 0.05\n"
    )
    assert list(cfg.algorithms) == ["dual", "b2"]
    b2 = cfg.algorithms["b2"]
    assert b2.beta == 0.2 and b2.variation.F == 0.7 and b2.variation.p_m == 0.05


def test_custom_instance_path_resolved_relative_to_config(tmp_path):
    for p in DATA_DIR.glob("NIMS*"):
        shutil.copy(p, tmp_path / p.name)
    (tmp_path / "exp.ini").write_text("[experiment]\ninstances = NIMS.ini\nalgorithms = dual\n")
    cfg = parse_config(tmp_path / "exp.ini")
    assert cfg.instances == ["NIMS.ini"]


def test_digest_tracks_content():
    a = parse_config_text(MINIMAL)
    b = parse_config_text(MINIMAL + "root_seed = 1\n")
    assert a.digest() == parse_config_text(MINIMAL).digest()
    assert a.digest() != b.digest()


# -- execution and persistence -------------------------------------------------

@pytest.fixture(scope="module")
def experiment(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("exp")
    cfg = small_config(tmp)
    records = run_experiment(cfg)
    return cfg, records, tmp / "out"


def csv_bodies(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for name in files:
            p = os.path.join(dirpath, name)
            rel = os.path.relpath(p, root)
            header, rows = _read_csv(p)
            if name == "meta.csv":
                i = header.index("wall_clock_seconds")
                rows = [r[:i] + r[i + 1:] for r in rows]
            out[rel] = (header, rows)
    return out


def test_cardinality(experiment):
    cfg, records, out = experiment
    assert len(records) == 2 * 3 * 2
    assert len(list(out.glob("runs/*/*/rep*/meta.csv"))) == 12
    assert sorted(p.name for p in (out / "summary").iterdir()) == [
        "friedman.csv", "hv.csv", "igd.csv", "median_convergence.csv"]


def test_run_layout_and_checkpoints(experiment):
    _, records, out = experiment
    d = out / "runs" / "NILS" / "dual" / "rep2"
    assert sorted(p.name for p in d.iterdir()) == [
        "convergence.csv", "front_task1.csv", "front_task2.csv", "meta.csv", "pop_task1.csv", "pop_task2.csv"]
    header, rows = _read_csv(d / "convergence.csv")
    assert header == ["evals", "task", "igd", "hv"]
    for task in ("1", "2"):
        evals = [int(r[0]) for r in rows if r[1] == task]
        assert evals == sorted(set(evals)) and evals[-1] == 600
    assert "e" in rows[0][2]
    header, rows = _read_csv(d / "pop_task1.csv")
    assert header == [f"x{j}" for j in range(1, 11)] and len(rows) == 20


def test_persisted_files_round_trip(experiment):
    _, records, out = experiment
    back = sorted(read_runs(out), key=lambda r: (r.instance, r.algorithm, r.repetition))
    originals = sorted(records, key=lambda r: (r.instance, r.algorithm, r.repetition))
    for a, b in zip(originals, back):
        assert a.checkpoints == [(e, k, i, h) for e, k, i, h in b.checkpoints]
        assert all(np.array_equal(x, y) for x, y in zip(a.fronts, b.fronts))
        assert all(np.array_equal(x, y) for x, y in zip(a.populations, b.populations))


def test_final_igd_matches_front_file(experiment):
    _, records, out = experiment
    scorers = {name: [FrontScorer(true_front_sample(t, 1000)) for t in load_builtin(name).tasks]
               for name in ("CIHS", "NILS")}
    for meta in out.glob("runs/*/*/rep*/meta.csv"):
        rec, _ = read_run(meta.parent)
        for k in range(2):
            _, rows = _read_csv(meta.parent / f"front_task{k + 1}.csv")
            front = np.array(rows, dtype=float)
            igd_value, hv_value = scorers[rec.instance][k].score(front)
            assert rec.final_metrics(k) == (igd_value, hv_value)


def test_summary_means_match_run_files(experiment):
    _, _, out = experiment
    header, rows = _read_csv(out / "summary" / "igd.csv")
    runs = read_runs(out)
    for row in rows:
        inst, task = row[0], int(row[1]) - 1
        for alg in ("dual", "internal-only", "moead-baseline"):
            vals = [r.final_metrics(task)[0] for r in runs if r.instance == inst and r.algorithm == alg]
            mean = float(row[header.index(f"{alg}_mean")])
            assert mean == pytest.approx(np.mean(vals), rel=1e-15)
        assert row[-1] == "printed"


def test_rerun_is_byte_identical(experiment, tmp_path):
    cfg, _, out = experiment
    second = small_config(tmp_path)
    run_experiment(second)
    assert csv_bodies(out) == csv_bodies(tmp_path / "out")


def test_execution_order_does_not_matter(experiment, tmp_path):
    _, _, out = experiment
    cfg = small_config(tmp_path)
    for job in reversed(plan_jobs(cfg)):
        _execute(job)
    first = {k: v for k, v in csv_bodies(out).items() if k.startswith("runs")}
    assert first == csv_bodies(tmp_path / "out")


def test_seeds_depend_on_identity_not_position(tmp_path):
    a = {(j.instance.name, j.label, j.repetition): j.seed for j in plan_jobs(small_config(tmp_path))}
    b = {(j.instance.name, j.label, j.repetition): j.seed
         for j in plan_jobs(small_config(tmp_path, instances="NILS, CIHS", algorithms="moead-baseline, dual"))}
    assert all(a[key] == b[key] for key in b)
    assert len(set(a.values())) == len(a)


def test_unwritable_output_fails_before_running(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = small_config(tmp_path)
    cfg.output_dir = str(blocker / "sub")
    with pytest.raises(OSError, match="not writable"):
        run_experiment(cfg)
    assert not any(tmp_path.glob("**/meta.csv"))


def test_parallel_workers_match_serial(experiment, tmp_path):
    _, _, out = experiment
    run_experiment(small_config(tmp_path), workers=2)
    assert csv_bodies(out) == csv_bodies(tmp_path / "out")


def test_summarize_directory_rewrites_summaries(experiment, tmp_path):
    _, _, out = experiment
    before = csv_bodies(out / "summary")
    for p in (out / "summary").iterdir():
        p.unlink()
    summarize_directory(out)
    assert csv_bodies(out / "summary") == before
    with pytest.raises(ValueError, match="no runs"):
        summarize_directory(tmp_path)


# -- summaries -----------------------------------------------------------------

def fake(inst, alg, rep, igd_value, hv_value=0.5):
    return RunRecord(inst, alg, rep, seed=rep, checkpoints=[(10, 0, igd_value, hv_value)],
                     fronts=[np.zeros((1, 2))], populations=[np.zeros((1, 3))])


def column(tables, name, col, row=0):
    header, rows = tables[name]
    return rows[row][header.index(col)]


def test_summary_single_record():
    t = summarize([fake("I", "a", 1, 0.3), fake("I", "b", 1, 0.4)])
    assert column(t, "igd.csv", "a_mean") == 0.3
    assert column(t, "igd.csv", "a_std_population") == 0.0


def test_summary_population_std():
    recs = [fake("I", "a", r, v) for r, v in enumerate([1.0, 2.0, 3.0], 1)]
    recs += [fake("I", "b", r, 5.0) for r in (1, 2, 3)]
    t = summarize(recs)
    assert column(t, "igd.csv", "a_mean") == 2.0
    assert column(t, "igd.csv", "a_std_population") == pytest.approx(math.sqrt(2 / 3), abs=1e-15)
    assert column(t, "igd.csv", "a_median") == 2.0


def test_best_marks_tie_to_lower_index():
    recs = [fake("I", "a", 1, 0.2, 0.5), fake("I", "b", 1, 0.2, 0.5), fake("I", "c", 1, 0.1, 0.9)]
    t = summarize(recs)
    assert column(t, "igd.csv", "best") == "c" and column(t, "igd.csv", "second_best") == "a"
    assert column(t, "hv.csv", "best") == "c" and column(t, "hv.csv", "second_best") == "a"


def test_friedman_table_over_medians():
    recs = [fake(i, "a", 1, 0.1) for i in "XYZ"] + [fake(i, "b", 1, 0.2) for i in "XYZ"]
    header, rows = summarize(recs)["friedman.csv"]
    assert header == ["algorithm", "igd_average_rank", "hv_average_rank", "blocks"]
    assert rows == [["a", 1.0, 1.5, 3], ["b", 2.0, 1.5, 3]]


def test_median_run_selection():
    assert median_run_index([3.0, 1.0, 2.0]) == 2
    assert median_run_index([4.0, 1.0, 3.0, 2.0]) == 3
    assert median_run_index([1.0, 1.0, 1.0]) == 1


def test_summary_rejects_inconsistent_groups():
    with pytest.raises(ValueError, match="duplicate"):
        summarize([fake("I", "a", 1, 0.1), fake("I", "a", 1, 0.2)])
    with pytest.raises(ValueError, match="missing runs"):
        summarize([fake("I", "a", 1, 0.1), fake("J", "b", 1, 0.1)])
    with pytest.raises(ValueError):
        summarize([])
