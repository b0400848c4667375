"""Experiment pipeline and grid runner.

One row = load -> split(seed) -> scale (fit on train) -> select top-k
features -> build circuits -> train -> predict test -> metrics.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from . import dataio, featselect, vqc
from .circuits import DEFAULT_PAULIS, CircuitTemplate, Entanglement, build_template
from .metrics import ConfusionCounts, MetricsReport, evaluate, report

log = logging.getLogger(__name__)

FEATURE_MAPS = ("ZZ", "Pauli")
ANSATZE = ("RealAmplitudes", "EfficientSU2", "ZZ", "Pauli")
_TEMPLATE_NAMES = {"ZZ": "zz", "Pauli": "pauli", "RealAmplitudes": "real_amplitudes", "EfficientSU2": "efficient_su2"}

TABLE_COLUMNS = (
    "Features",
    "Data size",
    "Feature selection",
    "Feature Map",
    "Ansatz",
    "Entanglement",
    "Accuracy",
    "Precision",
    "Recall",
    "F1-score",
    "MCC",
)


class ConfigError(ValueError):
    pass


def _canonical(value: str, choices: Sequence[str], what: str) -> str:
    for c in choices:
        if str(value).lower().replace("_", "").replace("-", "") == c.lower():
            return c
    raise ConfigError(f"unknown {what} {value!r}; choose from {', '.join(choices)}")


@dataclass(frozen=True)
class ExperimentConfig:
    """One grid cell. ``ansatz`` may name a feature map (ZZ/Pauli) to use it as the ansatz.

    ``dataset_path`` also accepts ``fixture`` (the bundled 60-row file) and
    ``synthetic:<rows>:<seed>``.
    """

    dataset_path: str
    seed: int
    k_features: int = 3
    selection: str = "FS1"
    train_size: int = 300
    test_size: int | None = None
    feature_map: str = "ZZ"
    ansatz: str = "EfficientSU2"
    entanglement: str = "linear"
    reps: int = 2
    pauli_labels: tuple[str, ...] = DEFAULT_PAULIS
    max_iterations: int = 200
    loss_tolerance: float = 1e-6
    optimizer: str = "gd"

    def __post_init__(self) -> None:
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        if not 2 <= int(self.k_features) <= 8:
            raise ConfigError(f"k_features must be in 2..8, got {self.k_features}")
        if self.train_size < 1 or (self.test_size is not None and self.test_size < 1):
            raise ConfigError("train_size and test_size must be positive")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        try:
            set_("selection", featselect.Method.parse(self.selection).value)
            set_("entanglement", Entanglement.parse(self.entanglement).value)
            vqc.TrainConfig(self.max_iterations, self.loss_tolerance, self.seed, self.optimizer)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        set_("feature_map", _canonical(self.feature_map, FEATURE_MAPS, "feature map"))
        set_("ansatz", _canonical(self.ansatz, ANSATZE, "ansatz"))
        set_("pauli_labels", tuple(self.pauli_labels))

    @property
    def effective_test_size(self) -> int:
        return self.test_size if self.test_size is not None else dataio.default_test_size(self.train_size)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "pauli_labels" in d and isinstance(d["pauli_labels"], str):
            d["pauli_labels"] = tuple(p for p in d["pauli_labels"].split(",") if p)
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class ResultRow:
    config: ExperimentConfig
    metrics: MetricsReport | None = None
    counts: ConfusionCounts | None = None
    seconds: float = 0.0
    iterations_used: int = 0
    final_loss: float | None = None
    error: str | None = None
    model: vqc.VqcModel | None = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.error is None

    def table_cells(self) -> list[str]:
        c = self.config
        head = [str(c.k_features), str(c.train_size), c.selection, c.feature_map, c.ansatz, c.entanglement]
        if self.metrics is None:
            return head + ["error"] * 5
        return head + [f"{v:.3f}" for v in self.metrics.rounded(3)]

    def to_record(self, timing: bool = False) -> dict:
        rec = {"config": asdict(self.config)}
        rec["config"]["pauli_labels"] = list(self.config.pauli_labels)
        if self.metrics is not None:
            rec["metrics"] = asdict(self.metrics)
            rec["counts"] = asdict(self.counts)
            rec["iterations_used"] = self.iterations_used
            rec["final_loss"] = self.final_loss
        if self.error is not None:
            rec["error"] = self.error
        if timing:
            rec["seconds"] = self.seconds
        return rec


@lru_cache(maxsize=4)
def _load(path: str) -> dataio.Dataset:
    if path == "fixture":
        return dataio.load_fixture()
    if path.startswith("synthetic:"):
        _, rows, seed = path.split(":")
        return dataio.make_synthetic(int(rows), int(seed))
    return dataio.load_csv(path)


@lru_cache(maxsize=8)
def _ranking(path: str, method: str) -> featselect.FeatureRanking:
    return featselect.rank(_load(path), method)


def build_circuits(cfg: ExperimentConfig) -> tuple[CircuitTemplate, CircuitTemplate]:
    n = cfg.k_features
    paulis = cfg.pauli_labels if cfg.feature_map == "Pauli" else ()
    fm = build_template(_TEMPLATE_NAMES[cfg.feature_map], n, cfg.reps, cfg.entanglement, paulis)
    name = _TEMPLATE_NAMES[cfg.ansatz]
    if cfg.ansatz in FEATURE_MAPS:
        an_paulis = cfg.pauli_labels if cfg.ansatz == "Pauli" else ()
        ansatz = build_template(name, n, cfg.reps, cfg.entanglement, an_paulis).as_ansatz()
    else:
        ansatz = build_template(name, n, cfg.reps, cfg.entanglement)
    return fm, ansatz


def run_experiment(cfg: ExperimentConfig) -> ResultRow:
    """Run one configuration end to end. Raises on failure."""
    start = time.perf_counter()
    data = _load(cfg.dataset_path)
    # feature order is fixed from the whole file, then applied to every split
    ranking = _ranking(cfg.dataset_path, cfg.selection)
    sp = dataio.split(data, cfg.train_size, cfg.seed, cfg.effective_test_size)
    train = featselect.select(dataio.minmax_scale(sp.train, sp.train), ranking, cfg.k_features)
    test = featselect.select(dataio.minmax_scale(sp.train, sp.test), ranking, cfg.k_features)

    fm, ansatz = build_circuits(cfg)
    model = vqc.make_model(fm, ansatz)
    tcfg = vqc.TrainConfig(cfg.max_iterations, cfg.loss_tolerance, cfg.seed, cfg.optimizer)
    rep = vqc.train(model, train.features, train.labels, tcfg)
    pred = vqc.predict(rep.model, test.features)
    counts, metrics = evaluate(test.labels, pred)
    return ResultRow(
        config=cfg,
        metrics=metrics,
        counts=counts,
        seconds=time.perf_counter() - start,
        iterations_used=rep.iterations_used,
        final_loss=rep.final_loss,
        model=rep.model,
    )


def _safe_run(cfg: ExperimentConfig) -> ResultRow:
    try:
        row = run_experiment(cfg)
        row.model = None  # keep pickled results small
        return row
    except Exception as exc:  # isolate per row
        log.warning("row failed (%s): %s", cfg, exc)
        return ResultRow(config=cfg, error=f"{type(exc).__name__}: {exc}")


def best_of(rows: Sequence[ResultRow]) -> ResultRow:
    ok = [r for r in rows if r.ok]
    if not ok:
        return rows[0]
    return max(ok, key=lambda r: (r.metrics.accuracy, r.metrics.mcc))


def run_grid(grid: Sequence[ExperimentConfig], parallelism: int = 1, seeds: int = 1) -> list[ResultRow]:
    """Run every config; with ``seeds > 1`` each cell is best-of-N over ``seed .. seed+N-1``.

    Output follows grid order whatever the scheduling.
    """
    if not grid:
        raise ConfigError("empty grid")
    expanded = [replace(c, seed=c.seed + s) for c in grid for s in range(seeds)]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            flat = list(pool.map(_safe_run, expanded))
    else:
        flat = [_safe_run(c) for c in expanded]
    return [best_of(flat[i : i + seeds]) for i in range(0, len(flat), seeds)]


def sort_rows(rows: Iterable[ResultRow]) -> list[ResultRow]:
    """Accuracy then MCC, both descending; failed rows last."""
    return sorted(rows, key=lambda r: (not r.ok, -(r.metrics.accuracy if r.ok else 0), -(r.metrics.mcc if r.ok else 0)))


def paper_grid(dataset_path: str, seed: int, **overrides) -> list[ExperimentConfig]:
    cells = itertools.product(
        range(2, 9), ("FS1", "FS2"), (180, 300), FEATURE_MAPS, ("RealAmplitudes", "EfficientSU2", "AsFeatureMap"),
        ("linear", "circular", "full"),
    )
    out = []
    for k, sel, size, fmap, ans, ent in cells:
        # the "feature map as ansatz" cell repeats the feature-map circuit
        ansatz = fmap if ans == "AsFeatureMap" else ans
        out.append(ExperimentConfig(dataset_path, seed, k, sel, size, None, fmap, ansatz, ent, **overrides))
    return out


def expand_grid(spec: dict, dataset_path: str, seed: int) -> list[ExperimentConfig]:
    """Grid file: ``{"base": {...}, "grid": {field: [values...]}}`` or ``{"configs": [{...}, ...]}``."""
    base = {"dataset_path": dataset_path, "seed": seed, **spec.get("base", {})}
    if "configs" in spec:
        return [ExperimentConfig.from_dict({**base, **c}) for c in spec["configs"]]
    axes = spec.get("grid", {})
    keys = list(axes)
    return [ExperimentConfig.from_dict({**base, **dict(zip(keys, vals))}) for vals in itertools.product(*axes.values())]


def emit_table(rows: Sequence[ResultRow], fmt: str = "csv") -> str:
    if not rows:
        raise ValueError("no rows to emit")
    body = [r.table_cells() for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        w.writerows(body)
        return buf.getvalue()
    if fmt == "markdown":
        lines = ["| " + " | ".join(TABLE_COLUMNS) + " |", "|" + "---|" * len(TABLE_COLUMNS)]
        lines += ["| " + " | ".join(cells) + " |" for cells in body]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")


def summarize_failures(rows: Sequence[ResultRow]) -> list[str]:
    return [f"row {i}: {r.error}" for i, r in enumerate(rows) if not r.ok]


def jointly_realizable(row: ResultRow) -> bool:
    """Metrics must equal those recomputed from the row's integer confusion counts."""
    return (
        row.counts is not None
        and report(row.counts) == row.metrics
        and row.counts.total == row.config.effective_test_size
    )
