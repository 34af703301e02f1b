"""Experiment runner: twirl | train | vqe | barren | dataset.

Every subcommand reads a JSON config (validated against a schema before any
computation), writes deterministic CSV bodies plus a JSON manifest echoing
the config, and renders figures next to the delimited output. Exit codes:
0 success, 1 config error, 2 runtime divergence.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from . import datasets, figures
from .datasets import SplitSpec, balanced_split, features_and_targets
from .models import build_driving_model, build_ttt_model, random_layout
from .paulis import PauliSum
from .symmetry import (
    BUILTIN_REPS,
    HaarTwirlSpec,
    make_parity_rep,
    make_trivial_rep,
    symmetrize_gateset,
)
from .training import TrainConfig, TrainData, TrainingDiverged, train
from .vqe import AnsatzSpec, barren_variance, build_hamiltonian, log_variance_slope, minimize_energy

HEAVY_CELLS = {(4, 4), (4, 5), (5, 3), (5, 4), (5, 5)}

STANDARD_2Q = {
    "standard2q": [
        {"XI": 1.0},
        {"YI": 1.0},
        {"ZI": 1.0},
        {"IX": 1.0},
        {"IY": 1.0},
        {"IZ": 1.0},
        {"ZZ": 1.0},
    ]
}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# Config schemas
# ---------------------------------------------------------------------------

_INT_ARRAY = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}

SCHEMAS = {
    "twirl": {
        "type": "object",
        "properties": {
            "rep": {"type": "string"},
            "n": {"type": "integer", "minimum": 1, "maximum": 12},
            "haar": {"type": "boolean"},
            "gateset": {
                "anyOf": [
                    {"type": "string"},
                    {"type": "array", "items": {"type": "object"}, "minItems": 1},
                ]
            },
        },
        "required": ["gateset"],
        "additionalProperties": False,
    },
    "dataset": {
        "type": "object",
        "properties": {
            "dataset": {"enum": ["ttt", "driving"]},
            "split": {
                "type": "object",
                "properties": {
                    "train_size": {"type": "integer", "minimum": 1},
                    "test_size": {"type": "integer", "minimum": 1},
                    "seed": {"type": "integer"},
                    "allow_duplicates": {"type": "boolean"},
                },
                "required": ["train_size", "test_size", "seed"],
                "additionalProperties": False,
            },
        },
        "required": ["dataset"],
        "additionalProperties": False,
    },
    "train": {
        "type": "object",
        "properties": {
            "task": {"enum": ["ttt", "driving"]},
            "l": _INT_ARRAY,
            "p": _INT_ARRAY,
            "layouts": {
                "anyOf": [
                    {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    {
                        "type": "object",
                        "properties": {
                            "random_count": {"type": "integer", "minimum": 1},
                            "base_seed": {"type": "integer"},
                        },
                        "required": ["random_count"],
                        "additionalProperties": False,
                    },
                ]
            },
            "variants": {
                "type": "array",
                "items": {"enum": ["invariant", "free"]},
                "minItems": 1,
            },
            "seeds": _INT_ARRAY,
            "epochs": {"type": "integer", "minimum": 1},
            "steps_per_epoch": {"type": "integer", "minimum": 1},
            "batch_size": {"type": "integer", "minimum": 1},
            "learning_rate": {"type": "number", "exclusiveMinimum": 0},
            "optimizer": {"enum": ["adam", "lbfgs"]},
            "lbfgs_steps": {"type": "integer", "minimum": 1},
            "train_size": {"type": "integer", "minimum": 1},
            "test_size": {"type": "integer", "minimum": 1},
            "entangler": {"enum": ["X", "Y", "Z"]},
            "include_heavy_cells": {"type": "boolean"},
        },
        "required": ["task", "l", "p", "seeds"],
        "additionalProperties": False,
    },
    "vqe": {
        "type": "object",
        "properties": {
            "model": {"enum": ["tfim", "heisenberg", "ltfim"]},
            "N": _INT_ARRAY,
            "g": {"type": "number"},
            "families": {"type": "array", "items": {"type": "string"}, "minItems": 1},
            "p": _INT_ARRAY,
            "seeds": {"anyOf": [{"type": "integer", "minimum": 1}, _INT_ARRAY]},
            "gtol": {"type": "number", "exclusiveMinimum": 0},
            "max_iterations": {"type": "integer", "minimum": 0},
        },
        "required": ["model", "N", "families", "p", "seeds"],
        "additionalProperties": False,
    },
    "barren": {
        "type": "object",
        "properties": {
            "families": {"type": "array", "items": {"type": "string"}, "minItems": 1},
            "N": _INT_ARRAY,
            "p": {"type": "integer", "minimum": 1},
            "samples": {"type": "integer", "minimum": 2},
            "seed": {"type": "integer"},
            "observable": {"type": "string"},
        },
        "required": ["families", "N", "p", "samples"],
        "additionalProperties": False,
    },
}


def load_config(args) -> dict:
    if bool(args.config) == bool(args.preset):
        raise ConfigError("exactly one of --config or --preset is required")
    if args.preset:
        ref = resources.files("symmqvar.presets").joinpath(args.preset + ".json")
        if not ref.is_file():
            names = sorted(
                p.name[:-5] for p in resources.files("symmqvar.presets").iterdir()
                if p.name.endswith(".json")
            )
            raise ConfigError(f"unknown preset {args.preset!r}; available: {names}")
        text = ref.read_text()
    else:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text()
    try:
        config = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err
    validator = Draft202012Validator(SCHEMAS[args.command])
    errors = sorted(validator.iter_errors(config), key=str)
    if errors:
        details = "; ".join(e.message for e in errors[:5])
        raise ConfigError(f"config rejected by schema: {details}")
    return config


def apply_smoke(command: str, config: dict) -> dict:
    """Documented smoke-scale reductions; seeds and cells are kept."""
    out = json.loads(json.dumps(config))
    if command == "train":
        out["epochs"] = min(out.get("epochs", 100), 10)
        out["lbfgs_steps"] = min(out.get("lbfgs_steps", 30), 10)
    elif command == "vqe":
        seeds = out["seeds"]
        out["seeds"] = min(seeds, 3) if isinstance(seeds, int) else seeds[:3]
        out["p"] = out["p"][:2]
        out["N"] = out["N"][:2]
    elif command == "barren":
        out["samples"] = min(out["samples"], 100)
        out["N"] = out["N"][:2]
    return out


# ---------------------------------------------------------------------------
# Deterministic CSV writing
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def write_manifest(path: Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def _thread_count(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("SYMMQVAR_THREADS")
    return max(1, int(env)) if env else 1


def _map_jobs(fn, jobs: list[dict], threads: int) -> list:
    """Run independent jobs, possibly in parallel; order follows `jobs`."""
    if threads <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, jobs))


# ---------------------------------------------------------------------------
# twirl
# ---------------------------------------------------------------------------


def _parse_gateset(config: dict) -> list[PauliSum]:
    raw = config["gateset"]
    if isinstance(raw, str):
        if raw not in STANDARD_2Q:
            raise ConfigError(f"unknown named gateset {raw!r}")
        raw = STANDARD_2Q[raw]
    gens = []
    for terms in raw:
        n = len(next(iter(terms)))
        try:
            gens.append(PauliSum(n, terms))
        except ValueError as err:
            raise ConfigError(f"bad generator {terms}: {err}") from err
    if len({g.n for g in gens}) != 1:
        raise ConfigError("generators act on differing qubit counts")
    return gens


def _resolve_rep(config: dict, n: int):
    if config.get("haar"):
        return HaarTwirlSpec(n), "haar-local"
    name = config.get("rep")
    if name is None:
        raise ConfigError("finite twirl needs a 'rep'")
    if name == "parity":
        return make_parity_rep(n), f"parity{n}"
    if name == "trivial":
        return make_trivial_rep(n), "trivial"
    if name in BUILTIN_REPS:
        rep = BUILTIN_REPS[name]()
        if rep.n != n:
            raise ConfigError(f"rep {name!r} acts on {rep.n} qubits, gateset on {n}")
        return rep, name
    raise ConfigError(f"unknown rep {name!r}")


def cmd_twirl(config: dict, out: Path, args) -> int:
    gens = _parse_gateset(config)
    rep, rep_name = _resolve_rep(config, gens[0].n)
    symmetrized, report = symmetrize_gateset(gens, rep)
    print(f"equivariant gateset under {rep_name}:")
    for i, g in enumerate(symmetrized):
        print(f"  [{i}] {g}")
    if not symmetrized:
        print("  (empty) warning: all generators trivialized")
    print(report.summary())
    payload = {
        "rep": rep_name,
        "inputs": [g.to_json() for g in gens],
        "generators": [g.to_json() for g in symmetrized],
        "trivialized": report.trivialized,
        "merged": [list(m) for m in report.merged],
    }
    write_manifest(out / "twirl.json", {"config": config, "result": payload})
    return 0


# ---------------------------------------------------------------------------
# dataset
# ---------------------------------------------------------------------------


def cmd_dataset(config: dict, out: Path, args) -> int:
    kind = config["dataset"]
    if kind == "ttt":
        items = datasets.enumerate_ttt()
        labels = [g.class_name for g in items]
    else:
        items = datasets.enumerate_driving()
        labels = [s.difficulty for s in items]
    datasets.write_dataset_csv(items, out / f"{kind}.csv")
    datasets.write_dataset_json(items, out / f"{kind}.json")
    from collections import Counter

    hist = Counter(labels)
    print(f"{kind}: {len(items)} items")
    for key in sorted(hist, key=str):
        print(f"  {key}: {hist[key]}")
    manifest: dict = {"config": config, "count": len(items), "histogram": {str(k): v for k, v in sorted(hist.items(), key=lambda kv: str(kv[0]))}}
    if config.get("split"):
        split = config["split"]
        spec = SplitSpec(
            split["train_size"],
            split["test_size"],
            split["seed"],
            balance_key="label" if kind == "ttt" else "difficulty",
            allow_duplicates=split.get("allow_duplicates", kind == "driving"),
        )
        manifest["split"] = datasets.split_manifest(items, spec)
    write_manifest(out / "manifest.json", manifest)
    if not args.no_figures:
        figures.dataset_histogram(labels, out / f"{kind}_histogram.png", title=kind)
    return 0


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------


def _train_defaults(config: dict) -> dict:
    task = config["task"]
    merged = {
        "layouts": ["cemoid"],
        "variants": ["invariant", "free"],
        "epochs": 100,
        "steps_per_epoch": 30,
        "batch_size": 15,
        "learning_rate": 0.01,
        "optimizer": "adam" if task == "ttt" else "lbfgs",
        "lbfgs_steps": 30,
        "train_size": 450 if task == "ttt" else 60,
        "test_size": 600 if task == "ttt" else 130,
        "entangler": "Y",
        "include_heavy_cells": False,
    }
    merged.update(config)
    return merged


def _resolve_layouts(cfg: dict) -> list[str]:
    layouts = cfg["layouts"]
    if isinstance(layouts, dict):
        base = layouts.get("base_seed", 0)
        return [random_layout(base + k) for k in range(layouts["random_count"])]
    return layouts


def _run_train_job(job: dict) -> dict:
    """One (cell, variant, seed) training run; a pure function of the job."""
    task = job["task"]
    if task == "ttt":
        model = build_ttt_model(
            job["l"], job["p"], job["layout"], invariant=job["invariant"], entangler=job["entangler"]
        )
        items = datasets.enumerate_ttt()
        spec = SplitSpec(job["train_size"], job["test_size"], seed=job["seed"], balance_key="label")
    else:
        model = build_driving_model(job["l"], job["p"], job["layout"], invariant=job["invariant"])
        items = datasets.enumerate_driving()
        spec = SplitSpec(
            job["train_size"], job["test_size"], seed=job["seed"],
            balance_key="difficulty", allow_duplicates=True,
        )
    train_set, test_set = balanced_split(items, spec)
    tx, ty = features_and_targets(train_set)
    sx, sy = features_and_targets(test_set)
    config = TrainConfig(
        epochs=job["epochs"],
        steps_per_epoch=job["steps_per_epoch"],
        batch_size=job["batch_size"],
        learning_rate=job["learning_rate"],
        seed=job["seed"],
        optimizer=job["optimizer"],
        lbfgs_steps=job["lbfgs_steps"],
    )
    try:
        result = train(model, TrainData(tx, ty, sx, sy), config)
    except TrainingDiverged as err:
        return {"job": job, "diverged_at": err.step, "metrics": [], "param_count": model.param_count}
    return {
        "job": job,
        "metrics": result.metrics,
        "param_count": model.param_count,
        "final_params": [float(v) for v in result.final_params],
        "model": model.describe(),
    }


def cmd_train(config: dict, out: Path, args) -> int:
    cfg = _train_defaults(config)
    layouts = _resolve_layouts(cfg)
    cells = []
    for l in cfg["l"]:
        for p in cfg["p"]:
            if (l, p) in HEAVY_CELLS and not cfg["include_heavy_cells"]:
                continue
            for idx, layout in enumerate(layouts):
                cells.append((l, p, idx, layout))
    jobs = []
    for l, p, layout_idx, layout in cells:
        for variant in cfg["variants"]:
            for seed in cfg["seeds"]:
                run_id = f"{cfg['task']}-l{l}-p{p}-L{layout_idx:02d}-{variant}-s{seed}"
                jobs.append(
                    {
                        "run_id": run_id,
                        "task": cfg["task"],
                        "l": l,
                        "p": p,
                        "layout_idx": layout_idx,
                        "layout": layout,
                        "invariant": variant == "invariant",
                        "variant": variant,
                        "seed": seed,
                        "epochs": cfg["epochs"],
                        "steps_per_epoch": cfg["steps_per_epoch"],
                        "batch_size": cfg["batch_size"],
                        "learning_rate": cfg["learning_rate"],
                        "optimizer": cfg["optimizer"],
                        "lbfgs_steps": cfg["lbfgs_steps"],
                        "train_size": cfg["train_size"],
                        "test_size": cfg["test_size"],
                        "entangler": cfg["entangler"],
                    }
                )
    results = _map_jobs(_run_train_job, jobs, _thread_count(args))
    results.sort(key=lambda r: r["job"]["run_id"])

    runs_dir = out / "runs"
    runs_dir.mkdir(exist_ok=True)
    axis = "epoch" if cfg["optimizer"] == "adam" else "step"
    agg_header = [
        "run_id", "task", "l", "p", "layout", "variant", "seed", "param_count",
        "final_train_loss", "final_train_acc", "final_test_loss", "final_test_acc",
    ]
    agg_rows = []
    diverged = None
    manifest_runs = {}
    for res in results:
        job = res["job"]
        rows = [
            [job["run_id"], job["seed"], m[axis], m["train_loss"], m["train_acc"], m["test_loss"], m["test_acc"]]
            for m in res["metrics"]
        ]
        write_csv(
            runs_dir / f"{job['run_id']}.csv",
            ["run_id", "seed", axis, "train_loss", "train_acc", "test_loss", "test_acc"],
            rows,
        )
        if "diverged_at" in res:
            diverged = (job["run_id"], res["diverged_at"])
            continue
        last = res["metrics"][-1]
        agg_rows.append(
            [
                job["run_id"], job["task"], job["l"], job["p"], job["layout"], job["variant"],
                job["seed"], res["param_count"], last["train_loss"], last["train_acc"],
                last["test_loss"], last["test_acc"],
            ]
        )
        manifest_runs[job["run_id"]] = {
            "seed": job["seed"],
            "layout": job["layout"],
            "variant": job["variant"],
            "param_count": res["param_count"],
            "final_params": res["final_params"],
        }
        if not args.no_figures:
            figures.training_curves(res["metrics"], job["run_id"], runs_dir / f"{job['run_id']}.png")
    write_csv(out / "aggregate.csv", agg_header, agg_rows)

    # per-cell (invariant - free) deltas of the mean final accuracies
    delta_rows = []
    for l, p, layout_idx, layout in cells:
        sel = lambda variant, key: [
            row[agg_header.index(key)]
            for row in agg_rows
            if (row[2], row[3], row[4], row[5]) == (l, p, layout, variant)
        ]
        inv_test, free_test = sel("invariant", "final_test_acc"), sel("free", "final_test_acc")
        inv_train, free_train = sel("invariant", "final_train_acc"), sel("free", "final_train_acc")
        if inv_test and free_test:
            delta_rows.append(
                [
                    cfg["task"], l, p, layout,
                    float(np.mean(inv_train) - np.mean(free_train)),
                    float(np.mean(inv_test) - np.mean(free_test)),
                ]
            )
    write_csv(
        out / "deltas.csv",
        ["task", "l", "p", "layout", "delta_mean_train_acc", "delta_mean_test_acc"],
        delta_rows,
    )
    manifest = {
        "config": config,
        "resolved": cfg,
        "layouts": layouts,
        "runs": manifest_runs,
    }
    if diverged:
        manifest["diverged"] = {"run_id": diverged[0], "step": diverged[1]}
    write_manifest(out / "manifest.json", manifest)
    if not args.no_figures and agg_rows:
        dict_rows = [dict(zip(agg_header, row)) for row in agg_rows]
        figures.sweep_grid(dict_rows, "final_test_acc", out / "sweep_test_acc.png")
        figures.sweep_grid(dict_rows, "final_train_acc", out / "sweep_train_acc.png")
        delta_dicts = [
            {"delta_mean_train_acc": r[4], "delta_mean_test_acc": r[5]} for r in delta_rows
        ]
        if delta_dicts:
            figures.accuracy_delta_violins(delta_dicts, out / "accuracy_deltas.png")
    for row in delta_rows:
        print(
            f"cell l={row[1]} p={row[2]} layout={row[3][:10]}: "
            f"delta_train={row[4]:+.4f} delta_test={row[5]:+.4f}"
        )
    if diverged:
        print(f"run {diverged[0]} diverged at step {diverged[1]}", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------
# vqe
# ---------------------------------------------------------------------------


def _run_vqe_job(job: dict) -> dict:
    h = build_hamiltonian(job["model"], job["N"], job.get("g"))
    spec = AnsatzSpec(job["family"], job["N"], job["p"])
    result = minimize_energy(
        h, spec, seed=job["seed"], gtol=job.get("gtol", 1e-8),
        max_iterations=job.get("max_iterations", 5000),
    )
    return {
        "job": job,
        "final_energy": result.final_energy,
        "exact_energy": result.exact_energy,
        "iterations": result.iterations,
        "fn_evals": result.fn_evals,
    }


def cmd_vqe(config: dict, out: Path, args) -> int:
    seeds = config["seeds"]
    seed_list = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    for family in config["families"]:
        AnsatzSpec(family, max(config["N"]), 1)  # validates family names early
    jobs = [
        {
            "model": config["model"],
            "N": n,
            "g": config.get("g"),
            "family": family,
            "p": p,
            "seed": seed,
            "gtol": config.get("gtol", 1e-8),
            "max_iterations": config.get("max_iterations", 5000),
        }
        for family in config["families"]
        for n in config["N"]
        for p in config["p"]
        for seed in seed_list
    ]
    results = _map_jobs(_run_vqe_job, jobs, _thread_count(args))
    results.sort(key=lambda r: (r["job"]["family"], r["job"]["N"], r["job"]["p"], r["job"]["seed"]))
    header = ["family", "N", "p", "seed", "final_energy", "exact_energy", "iterations", "fn_evals"]
    rows = [
        [
            r["job"]["family"], r["job"]["N"], r["job"]["p"], r["job"]["seed"],
            r["final_energy"], r["exact_energy"], r["iterations"], r["fn_evals"],
        ]
        for r in results
    ]
    write_csv(out / "vqe.csv", header, rows)
    write_manifest(out / "manifest.json", {"config": config, "rows": len(rows)})
    if not args.no_figures and rows:
        dict_rows = [dict(zip(header, row)) for row in rows]
        figures.vqe_energy_iterations(dict_rows, out / "energy_iterations.png")
    for family in config["families"]:
        sub = [r for r in results if r["job"]["family"] == family]
        mean = np.mean([r["final_energy"] for r in sub])
        print(f"{family}: mean energy {mean:.6f} over {len(sub)} runs")
    return 0


# ---------------------------------------------------------------------------
# barren
# ---------------------------------------------------------------------------


def _run_barren_job(job: dict) -> dict:
    rows = barren_variance(
        job["family"], [job["N"]], job["p"],
        observable=job.get("observable", "Z1Z2"),
        samples=job["samples"], seed=job["seed"],
    )
    return {"job": job, "row": rows[0]}


def cmd_barren(config: dict, out: Path, args) -> int:
    jobs = [
        {
            "family": family,
            "N": n,
            "p": config["p"],
            "samples": config["samples"],
            "seed": config.get("seed", 0),
            "observable": config.get("observable", "Z1Z2"),
        }
        for family in config["families"]
        for n in config["N"]
    ]
    for job in jobs:
        AnsatzSpec(job["family"], job["N"], 1)
    results = _map_jobs(_run_barren_job, jobs, _thread_count(args))
    results.sort(key=lambda r: (r["job"]["family"], r["job"]["N"]))
    header = ["family", "N", "variance", "stderr"]
    rows = [
        [r["row"]["family"], r["row"]["N"], r["row"]["variance"], r["row"]["stderr"]]
        for r in results
    ]
    write_csv(out / "barren.csv", header, rows)
    slopes = {}
    for family in config["families"]:
        sub = [r["row"] for r in results if r["row"]["family"] == family]
        if len(sub) >= 2:
            slopes[family] = log_variance_slope(sub)
            print(f"{family}: log-variance slope {slopes[family]:.4f}")
    write_manifest(out / "manifest.json", {"config": config, "slopes": slopes})
    if not args.no_figures and rows:
        figures.barren_plot([r["row"] for r in results], out / "barren.png")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

COMMANDS = {
    "twirl": cmd_twirl,
    "train": cmd_train,
    "vqe": cmd_vqe,
    "barren": cmd_barren,
    "dataset": cmd_dataset,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symmqvar",
        description="Symmetry-equivariant variational circuit experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="path to a JSON config")
        cmd.add_argument("--preset", help="name of a bundled preset config")
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument("--threads", type=int, default=None, help="parallel workers (or SYMMQVAR_THREADS)")
        cmd.add_argument("--smoke", action="store_true", help="reduced smoke-scale protocol")
        cmd.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    if args.smoke:
        config = apply_smoke(args.command, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](config, out, args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    except TrainingDiverged as err:
        print(f"runtime divergence at step {err.step}", file=sys.stderr)
        return 2
    except FloatingPointError as err:
        print(f"runtime divergence: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
