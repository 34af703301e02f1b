"""CLI contract: configs, outputs, determinism, exit codes."""

import json
from pathlib import Path

import pytest

from symmqvar.cli import main


def run_cli(*argv) -> int:
    return main(list(argv))


def write_config(tmp_path: Path, payload: dict, name="config.json") -> str:
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


# -- twirl -------------------------------------------------------------------


def test_twirl_klein_standard_gateset(tmp_path, capsys):
    out = tmp_path / "out"
    assert run_cli("twirl", "--preset", "twirl_klein", "--out", str(out)) == 0
    result = json.loads((out / "twirl.json").read_text())["result"]
    assert result["generators"] == [{"IX": 0.5, "XI": 0.5}, {"ZZ": 1.0}]
    assert result["trivialized"] == [1, 2, 4, 5]


def test_twirl_trivial_group_echoes_input(tmp_path):
    cfg = write_config(tmp_path, {"rep": "trivial", "n": 1, "gateset": [{"X": 1.0}, {"Z": 0.5}]})
    out = tmp_path / "out"
    assert run_cli("twirl", "--config", cfg, "--out", str(out)) == 0
    result = json.loads((out / "twirl.json").read_text())["result"]
    assert result["generators"] == [{"X": 1.0}, {"Z": 0.5}]


def test_twirl_all_trivialized_warns(tmp_path, capsys):
    # {I, X} representation kills the {Y, Z} decomposition
    cfg = write_config(
        tmp_path,
        {"rep": "parity", "n": 1, "gateset": [{"Y": 1.0}, {"Z": 1.0}]},
    )
    out = tmp_path / "out"
    assert run_cli("twirl", "--config", cfg, "--out", str(out)) == 0
    captured = capsys.readouterr()
    assert "all generators trivialized" in captured.out
    result = json.loads((out / "twirl.json").read_text())["result"]
    assert result["generators"] == []


# -- config handling ---------------------------------------------------------


def test_missing_config_is_exit_1(tmp_path):
    assert run_cli("twirl", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)) == 1


def test_schema_violation_is_exit_1(tmp_path):
    cfg = write_config(tmp_path, {"task": "ttt"})  # missing required fields
    assert run_cli("train", "--config", cfg, "--out", str(tmp_path / "o")) == 1


def test_unknown_preset_is_exit_1(tmp_path):
    assert run_cli("twirl", "--preset", "does_not_exist", "--out", str(tmp_path)) == 1


def test_config_and_preset_together_rejected(tmp_path):
    cfg = write_config(tmp_path, {"gateset": "standard2q", "rep": "klein"})
    assert run_cli("twirl", "--config", cfg, "--preset", "twirl_klein", "--out", str(tmp_path)) == 1


def test_divergent_training_is_exit_2(tmp_path):
    # expectations are bounded, so only an infinite step kills the loss;
    # JSON 1e999 parses to inf and the second step sees the non-finite loss
    cfg = write_config(
        tmp_path,
        {
            "task": "ttt",
            "l": [1],
            "p": [1],
            "seeds": [0],
            "epochs": 1,
            "steps_per_epoch": 2,
            "batch_size": 5,
            "learning_rate": 1e999,
            "train_size": 15,
            "test_size": 15,
        },
    )
    out = tmp_path / "out"
    code = run_cli("train", "--config", cfg, "--out", str(out), "--no-figures")
    assert code == 2
    # partial results are flushed before exiting
    assert (out / "manifest.json").exists()
    assert json.loads((out / "manifest.json").read_text())["diverged"]["run_id"]


# -- dataset -----------------------------------------------------------------


def test_dataset_export_counts(tmp_path):
    out = tmp_path / "out"
    assert run_cli("dataset", "--preset", "dataset_driving", "--out", str(out), "--no-figures") == 0
    lines = (out / "driving.csv").read_text().splitlines()
    from symmqvar.datasets import enumerate_driving

    assert len(lines) == len(enumerate_driving()) + 1
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["count"] == 200
    assert len(manifest["split"]["train_indices"]) == 60
    assert len(manifest["split"]["test_indices"]) == 130


def test_dataset_split_manifest_reproducible(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert run_cli("dataset", "--preset", "dataset_ttt", "--out", str(out), "--no-figures") == 0
    m1 = json.loads((out1 / "manifest.json").read_text())
    m2 = json.loads((out2 / "manifest.json").read_text())
    assert m1["split"] == m2["split"]


# -- train -------------------------------------------------------------------

SMOKE_TRAIN = {
    "task": "ttt",
    "l": [1],
    "p": [1],
    "seeds": [0, 1],
    "epochs": 2,
    "steps_per_epoch": 2,
    "batch_size": 5,
    "train_size": 30,
    "test_size": 30,
}


def test_train_smoke_rows_and_manifest_round_trip(tmp_path):
    cfg_doc = dict(SMOKE_TRAIN)
    cfg = write_config(tmp_path, cfg_doc)
    out = tmp_path / "out"
    assert run_cli("train", "--config", cfg, "--out", str(out), "--no-figures") == 0
    run_csv = (out / "runs" / "ttt-l1-p1-L00-invariant-s0.csv").read_text().splitlines()
    assert len(run_csv) == 3  # header + 2 epoch rows
    assert run_csv[0] == "run_id,seed,epoch,train_loss,train_acc,test_loss,test_acc"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"] == cfg_doc  # config round-trips unchanged
    run = manifest["runs"]["ttt-l1-p1-L00-invariant-s0"]
    assert run["param_count"] == 12
    assert len(run["final_params"]) == 12
    agg = (out / "aggregate.csv").read_text().splitlines()
    assert len(agg) == 1 + 4  # 2 variants x 2 seeds
    deltas = (out / "deltas.csv").read_text().splitlines()
    assert len(deltas) == 2


def test_train_byte_identical_across_runs_and_threads(tmp_path):
    cfg = write_config(tmp_path, SMOKE_TRAIN)
    outs = []
    for name, threads in (("a", "1"), ("b", "1"), ("c", "2")):
        out = tmp_path / name
        assert run_cli(
            "train", "--config", cfg, "--out", str(out), "--threads", threads, "--no-figures"
        ) == 0
        outs.append(out)
    files = ["aggregate.csv", "deltas.csv", "runs/ttt-l1-p1-L00-free-s1.csv"]
    for f in files:
        bodies = [(o / f).read_bytes() for o in outs]
        assert bodies[0] == bodies[1] == bodies[2], f


def test_train_smoke_flag_caps_epochs(tmp_path):
    cfg = write_config(tmp_path, {**SMOKE_TRAIN, "epochs": 50, "seeds": [0]})
    out = tmp_path / "out"
    assert run_cli("train", "--config", cfg, "--out", str(out), "--smoke", "--no-figures") == 0
    rows = (out / "runs" / "ttt-l1-p1-L00-invariant-s0.csv").read_text().splitlines()
    assert len(rows) == 1 + 10  # smoke caps at 10 epochs


def test_train_renders_figures_by_default(tmp_path):
    cfg = write_config(tmp_path, {**SMOKE_TRAIN, "seeds": [0]})
    out = tmp_path / "out"
    assert run_cli("train", "--config", cfg, "--out", str(out)) == 0
    assert (out / "accuracy_deltas.png").exists()
    assert (out / "sweep_test_acc.png").exists()
    assert (out / "runs" / "ttt-l1-p1-L00-invariant-s0.png").exists()


def test_driving_train_smoke(tmp_path):
    cfg = write_config(
        tmp_path,
        {"task": "driving", "l": [1], "p": [1], "seeds": [0], "lbfgs_steps": 3},
    )
    out = tmp_path / "out"
    assert run_cli("train", "--config", cfg, "--out", str(out), "--no-figures") == 0
    rows = (out / "runs" / "driving-l1-p1-L00-invariant-s0.csv").read_text().splitlines()
    assert rows[0] == "run_id,seed,step,train_loss,train_acc,test_loss,test_acc"
    assert 2 <= len(rows) <= 4


def test_heavy_cells_skipped_by_default(tmp_path):
    cfg = write_config(
        tmp_path,
        {**SMOKE_TRAIN, "l": [4], "p": [4], "seeds": [0]},
    )
    out = tmp_path / "out"
    assert run_cli("train", "--config", cfg, "--out", str(out), "--no-figures") == 0
    assert (out / "aggregate.csv").read_text().splitlines()[1:] == []


# -- vqe & barren ------------------------------------------------------------


def test_vqe_smoke_rows_and_variational_bound(tmp_path):
    cfg = write_config(
        tmp_path,
        {"model": "tfim", "N": [4], "g": 1.0, "families": ["QAOA"], "p": [1, 2], "seeds": 3},
    )
    out = tmp_path / "out"
    assert run_cli("vqe", "--config", cfg, "--out", str(out), "--no-figures") == 0
    lines = (out / "vqe.csv").read_text().splitlines()
    assert lines[0] == "family,N,p,seed,final_energy,exact_energy,iterations,fn_evals"
    assert len(lines) == 1 + 6  # 2 p-values x 3 seeds
    for line in lines[1:]:
        cells = line.split(",")
        assert float(cells[4]) >= float(cells[5]) - 1e-8


def test_vqe_deterministic_csv(tmp_path):
    cfg = write_config(
        tmp_path,
        {"model": "tfim", "N": [4], "families": ["QAOA"], "p": [1], "seeds": 2},
    )
    bodies = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run_cli("vqe", "--config", cfg, "--out", str(out), "--no-figures") == 0
        bodies.append((out / "vqe.csv").read_bytes())
    assert bodies[0] == bodies[1]


def test_barren_smoke_rows(tmp_path):
    out = tmp_path / "out"
    assert run_cli("barren", "--preset", "barren_smoke", "--out", str(out), "--smoke", "--no-figures") == 0
    lines = (out / "barren.csv").read_text().splitlines()
    assert lines[0] == "family,N,variance,stderr"
    assert len(lines) == 1 + 4  # 2 families x 2 sizes
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["slopes"]) == {"QAOA", "QAOAPrime"}


def test_unknown_vqe_family_rejected(tmp_path):
    cfg = write_config(
        tmp_path, {"model": "tfim", "N": [4], "families": ["QUQU"], "p": [1], "seeds": 1}
    )
    out = tmp_path / "out"
    with pytest.raises(ValueError):
        run_cli("vqe", "--config", cfg, "--out", str(out), "--no-figures")
