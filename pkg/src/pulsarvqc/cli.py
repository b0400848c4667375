"""Command-line entry point: ``pulsarvqc <verb> ...``.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 every grid row failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import dataio, featselect, vqc
from .experiment import (
    ConfigError,
    ExperimentConfig,
    emit_table,
    expand_grid,
    paper_grid,
    run_experiment,
    run_grid,
    sort_rows,
    summarize_failures,
)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_ALL_FAILED = 0, 1, 2, 3

# CLI flag -> ExperimentConfig field
_OVERRIDES = {
    "features": "k_features",
    "selection": "selection",
    "train_size": "train_size",
    "test_size": "test_size",
    "feature_map": "feature_map",
    "ansatz": "ansatz",
    "entanglement": "entanglement",
    "reps": "reps",
    "paulis": "pauli_labels",
    "max_iter": "max_iterations",
    "tol": "loss_tolerance",
    "optimizer": "optimizer",
}


def _data_arg(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument(
        "--data",
        required=required,
        help="HTRU_2.csv path, 'fixture', or 'synthetic:<rows>:<seed>' "
        f"(default: ${dataio.DATASET_ENV} or data/HTRU_2.csv)",
    )


def _experiment_args(p: argparse.ArgumentParser) -> None:
    _data_arg(p)
    p.add_argument("--seed", type=int, required=True, help="seed for the split and weight init (required)")
    p.add_argument("--config", type=Path, help="JSON file with config fields; flags override it")
    p.add_argument("--features", type=int)
    p.add_argument("--selection", choices=["FS1", "FS2"])
    p.add_argument("--train-size", type=int)
    p.add_argument("--test-size", type=int)
    p.add_argument("--feature-map", choices=["ZZ", "Pauli"])
    p.add_argument("--ansatz", choices=["RealAmplitudes", "EfficientSU2", "ZZ", "Pauli"])
    p.add_argument("--entanglement", choices=["linear", "circular", "full"])
    p.add_argument("--reps", type=int)
    p.add_argument("--paulis", help="comma-separated Pauli labels for the Pauli map, e.g. Z,ZZ")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--optimizer", choices=["gd", "bfgs"])
    p.add_argument("--format", choices=["csv", "markdown"], default="csv")
    p.add_argument("--json", type=Path, help="also write full result records (with timings) as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pulsarvqc", description="Variational quantum classifier for HTRU-2")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch-data", help="download HTRU-2 and verify its shape")
    p.add_argument("--dest", default="data")
    p.add_argument("--url", default=dataio.HTRU2_URL, help="archive URL or local .zip/.csv path")

    p = sub.add_parser("rank-features", help="FS1/FS2 feature orderings as CSV")
    _data_arg(p)

    p = sub.add_parser("stats", help="per-class box-plot statistics as CSV")
    _data_arg(p)

    p = sub.add_parser("corr", help="Pearson correlation matrix and class correlations as CSV")
    _data_arg(p)

    p = sub.add_parser("run", help="train and evaluate one configuration")
    _experiment_args(p)
    p.add_argument("--save-model", type=Path)

    p = sub.add_parser("grid", help="run a configuration grid")
    _experiment_args(p)
    p.add_argument("--grid", type=Path, help="grid JSON: {'base': {...}, 'grid': {field: [...]}} or {'configs': [...]}")
    p.add_argument("--paper-grid", action="store_true", help="the full k x FS x size x map x ansatz x entanglement sweep")
    p.add_argument("--seeds", type=int, default=1, help="best-of-N seeds per cell")
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--sort", action="store_true", help="order rows by accuracy then MCC")
    return parser


def _resolve_data(value: str | None) -> str:
    if value in ("fixture",) or (value and value.startswith("synthetic:")):
        return value
    found = dataio.find_dataset(value)
    if found is None:
        where = value or f"${dataio.DATASET_ENV} / data/HTRU_2.csv"
        raise dataio.DataError(f"dataset not found at {where}; run 'pulsarvqc fetch-data' or pass --data")
    return str(found)


def _load(value: str | None) -> dataio.Dataset:
    path = _resolve_data(value)
    if path == "fixture":
        return dataio.load_fixture()
    if path.startswith("synthetic:"):
        _, rows, seed = path.split(":")
        return dataio.make_synthetic(int(rows), int(seed))
    return dataio.load_csv(path)


def _overrides(args) -> dict:
    out = {}
    for flag, fieldname in _OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            out[fieldname] = value
    return out


def _base_config(args) -> dict:
    base = {}
    if args.config is not None:
        base = json.loads(args.config.read_text())
    base.update(_overrides(args))
    base["dataset_path"] = _resolve_data(args.data or base.get("dataset_path"))
    base["seed"] = args.seed
    return base


def _write_json(path: Path | None, rows) -> None:
    if path is not None:
        path.write_text(json.dumps([r.to_record(timing=True) for r in rows], indent=2) + "\n")


def cmd_fetch(args, out) -> int:
    path = dataio.fetch_htru2(args.dest, args.url)
    data = dataio.load_csv(path)
    print(f"{path}: {len(data)} rows, positive fraction {data.positive_fraction:.4f}", file=out)
    return EXIT_OK


def cmd_rank(args, out) -> int:
    data = _load(args.data)
    out.write(featselect.rankings_csv(featselect.rank(data, "FS1"), featselect.rank(data, "FS2")))
    return EXIT_OK


def cmd_stats(args, out) -> int:
    rows = dataio.boxplot_table(_load(args.data))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: f"{v:.6g}" if isinstance(v, float) else v for k, v in r.items()})
    out.write(buf.getvalue())
    return EXIT_OK


def cmd_corr(args, out) -> int:
    data = _load(args.data)
    out.write(featselect.matrix_csv(data.feature_names, featselect.correlation_matrix(data)))
    out.write("\n")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["feature", "corr_with_class"])
    for name, r in zip(data.feature_names, featselect.class_correlations(data)):
        w.writerow([name, f"{r:.6f}"])
    out.write(buf.getvalue())
    return EXIT_OK


def cmd_run(args, out) -> int:
    cfg = ExperimentConfig.from_dict(_base_config(args))
    row = run_experiment(cfg)
    out.write(emit_table([row], args.format))
    _write_json(args.json, [row])
    if args.save_model is not None:
        vqc.save_model(row.model, args.save_model)
    return EXIT_OK


def cmd_grid(args, out) -> int:
    base = _base_config(args)
    if args.paper_grid:
        keep = {k: base[k] for k in ("reps", "max_iterations", "loss_tolerance", "optimizer") if k in base}
        grid = paper_grid(base["dataset_path"], base["seed"], **keep)
    elif args.grid is not None:
        spec = json.loads(args.grid.read_text())
        spec["base"] = {**spec.get("base", {}), **{k: v for k, v in base.items() if k not in ("dataset_path", "seed")}}
        grid = expand_grid(spec, base["dataset_path"], base["seed"])
    else:
        grid = [ExperimentConfig.from_dict(base)]
    if args.seeds < 1 or args.parallel < 1:
        raise ConfigError("--seeds and --parallel must be >= 1")

    rows = run_grid(grid, parallelism=args.parallel, seeds=args.seeds)
    if args.sort:
        rows = sort_rows(rows)
    convention = "single seed per cell" if args.seeds == 1 else f"best of {args.seeds} seeds per cell (by accuracy, then MCC)"
    out.write(f"# {len(rows)} configurations, base seed {args.seed}, {convention}\n")
    out.write(emit_table(rows, args.format))
    _write_json(args.json, rows)
    for msg in summarize_failures(rows):
        print(msg, file=sys.stderr)
    return EXIT_ALL_FAILED if not any(r.ok for r in rows) else EXIT_OK


_COMMANDS = {
    "fetch-data": cmd_fetch,
    "rank-features": cmd_rank,
    "stats": cmd_stats,
    "corr": cmd_corr,
    "run": cmd_run,
    "grid": cmd_grid,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _COMMANDS[args.command](args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (dataio.DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
