"""HTRU-2 ingestion, [0, pi] min-max scaling, seeded train/test splits
and per-class box-plot statistics."""

from __future__ import annotations

import csv
import io
import math
import os
import urllib.request
import zipfile
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

FEATURE_NAMES = ("Prof-mu", "Prof-sigma", "Prof-s", "Prof-k", "DM-mu", "DM-sigma", "DM-s", "DM-k")
PROFILE_FEATURES = FEATURE_NAMES[:4]

HTRU2_URL = "https://archive.ics.uci.edu/static/public/372/htru2.zip"
HTRU2_ROWS = 17898
HTRU2_COLUMNS = 9
DATASET_ENV = "PULSARVQC_HTRU2"
DEFAULT_LOCATIONS = ("data/HTRU_2.csv", "HTRU_2.csv")

TEST_FRACTION = 2 / 3


class DataError(ValueError):
    """Malformed or unusable input data."""


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = FEATURE_NAMES
    scaled: bool = False

    def __post_init__(self) -> None:
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels).astype(int)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
            raise DataError(f"features {X.shape} and labels {y.shape} do not line up")
        if X.shape[1] != len(self.feature_names):
            raise DataError(f"{X.shape[1]} columns but {len(self.feature_names)} names")
        if not np.all((y == 0) | (y == 1)):
            raise DataError("labels must be 0 or 1")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    def __len__(self) -> int:
        return self.labels.size

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def positive_fraction(self) -> float:
        return float(self.labels.mean())

    def rows(self, index) -> "Dataset":
        return replace(self, features=self.features[index], labels=self.labels[index])

    def columns(self, names: Sequence[str]) -> "Dataset":
        idx = [self.column_index(n) for n in names]
        return replace(self, features=self.features[:, idx], feature_names=tuple(names))

    def column_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise KeyError(f"no feature named {name!r}; have {self.feature_names}") from None

    def column(self, name: str) -> np.ndarray:
        return self.features[:, self.column_index(name)]


@dataclass(frozen=True)
class Split:
    train: Dataset
    test: Dataset
    train_size: int
    test_size: int
    seed: int
    train_index: np.ndarray
    test_index: np.ndarray


@dataclass(frozen=True)
class BoxStats:
    q1: float
    median: float
    q3: float
    whisker_low: float
    whisker_high: float
    outlier_count: int
    n: int

    @property
    def outlier_fraction(self) -> float:
        return self.outlier_count / self.n


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def parse_csv(text: str, source: str = "<string>") -> Dataset:
    rows = list(csv.reader(io.StringIO(text)))
    start = 0
    while start < len(rows) and not any(f.strip() for f in rows[start]):
        start += 1
    if start < len(rows) and not all(_is_number(f) for f in rows[start]):
        start += 1  # header
    feats, labels = [], []
    for lineno, row in enumerate(rows[start:], start + 1):
        if not any(f.strip() for f in row):
            continue
        if len(row) != len(FEATURE_NAMES) + 1:
            raise DataError(f"{source}:{lineno}: expected {len(FEATURE_NAMES) + 1} fields, got {len(row)}")
        try:
            values = [float(f) for f in row]
        except ValueError:
            raise DataError(f"{source}:{lineno}: non-numeric field in {row}") from None
        if values[-1] not in (0.0, 1.0):
            raise DataError(f"{source}:{lineno}: label must be 0 or 1, got {row[-1]!r}")
        feats.append(values[:-1])
        labels.append(int(values[-1]))
    if not feats:
        raise DataError(f"{source}: no data rows")
    return Dataset(np.array(feats), np.array(labels))


def load_csv(path: str | Path) -> Dataset:
    path = Path(path)
    return parse_csv(path.read_text(), str(path))


def write_csv(data: Dataset, path: str | Path, header: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow([*data.feature_names, "class"])
        for x, y in zip(data.features, data.labels):
            w.writerow([repr(float(v)) for v in x] + [int(y)])


def fixture_path() -> Path:
    """Path of the bundled 60-row synthetic file (same layout as HTRU-2)."""
    return Path(str(resources.files("pulsarvqc") / "data" / "synthetic_htru.csv"))


def load_fixture() -> Dataset:
    return load_csv(fixture_path())


def find_dataset(explicit: str | Path | None = None) -> Path | None:
    """Locate HTRU_2.csv: explicit path, then ``$PULSARVQC_HTRU2``, then the usual spots."""
    candidates = [explicit, os.environ.get(DATASET_ENV), *DEFAULT_LOCATIONS]
    for c in candidates:
        if c and Path(c).is_file():
            return Path(c)
    return None


def verify_canonical(data: Dataset) -> None:
    if len(data) != HTRU2_ROWS or data.n_features + 1 != HTRU2_COLUMNS:
        raise DataError(
            f"expected {HTRU2_ROWS} rows x {HTRU2_COLUMNS} columns, got {len(data)} x {data.n_features + 1}"
        )


def fetch_htru2(dest: str | Path = "data", url: str = HTRU2_URL, timeout: float = 60.0) -> Path:
    """Download the HTRU-2 archive, extract ``HTRU_2.csv`` into ``dest`` and check its shape.

    ``url`` may also be a local ``.zip`` or ``.csv`` path.
    """
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    target = dest / "HTRU_2.csv"
    if Path(url).exists():
        payload = Path(url).read_bytes()
    else:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            payload = resp.read()
    if payload[:2] == b"PK":
        with zipfile.ZipFile(io.BytesIO(payload)) as zf:
            name = next((n for n in zf.namelist() if n.lower().endswith("htru_2.csv")), None)
            if name is None:
                raise DataError("archive does not contain HTRU_2.csv")
            payload = zf.read(name)
    text = payload.decode()
    verify_canonical(parse_csv(text, url))
    target.write_text(text)
    return target


def fit_minmax(data: Dataset) -> tuple[np.ndarray, np.ndarray]:
    if len(data) == 0:
        raise DataError("cannot fit a scaler on an empty dataset")
    return data.features.min(axis=0), data.features.max(axis=0)


def minmax_scale(fit_on: Dataset, apply_to: Dataset) -> Dataset:
    """Map each column onto [0, pi] using ``fit_on``'s range; out-of-range values clamp."""
    if fit_on.scaled or apply_to.scaled:
        raise DataError("datasets must be unscaled")
    if fit_on.feature_names != apply_to.feature_names:
        raise DataError("fit and apply datasets have different columns")
    lo, hi = fit_minmax(fit_on)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    scaled = math.pi * (apply_to.features - lo) / safe
    scaled = np.where(span > 0, scaled, 0.0)
    return replace(apply_to, features=np.clip(scaled, 0.0, math.pi), scaled=True)


def default_test_size(train_size: int) -> int:
    return int(round(TEST_FRACTION * train_size))


def split(data: Dataset, train_size: int, seed: int, test_size: int | None = None) -> Split:
    """Uniform sample without replacement (not stratified), seeded."""
    if test_size is None:
        test_size = default_test_size(train_size)
    if train_size < 1 or test_size < 0:
        raise DataError("train_size must be >= 1 and test_size >= 0")
    if train_size + test_size > len(data):
        raise DataError(f"need {train_size + test_size} rows, dataset has {len(data)}")
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(data), size=train_size + test_size, replace=False)
    tr, te = picked[:train_size], picked[train_size:]
    return Split(data.rows(tr), data.rows(te), train_size, test_size, seed, tr, te)


def boxplot_stats(data: Dataset, feature: str, class_label: int) -> BoxStats:
    values = data.column(feature)[data.labels == class_label]
    if values.size == 0:
        raise DataError(f"no rows with class {class_label}")
    q1, med, q3 = np.percentile(values, [25, 50, 75])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = values[(values >= lo_fence) & (values <= hi_fence)]
    return BoxStats(
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        whisker_low=float(inside.min()),
        whisker_high=float(inside.max()),
        outlier_count=int(values.size - inside.size),
        n=int(values.size),
    )


def boxplot_table(data: Dataset) -> list[dict]:
    rows = []
    for name in data.feature_names:
        for label in (0, 1):
            s = boxplot_stats(data, name, label)
            rows.append({"feature": name, "class": label, **s.__dict__, "outlier_fraction": s.outlier_fraction})
    return rows


# Per-class (mean, std) for each column; class 0 gets heavy tails.
_SYNTH_PARAMS = {
    0: [(116.6, 17.5), (47.3, 6.2), (0.21, 0.33), (0.38, 1.03), (8.9, 24.4), (23.3, 16.7), (8.9, 4.2), (113.6, 106.7)],
    1: [(56.7, 30.0), (38.7, 8.0), (3.13, 1.87), (15.6, 14.0), (49.8, 45.3), (56.5, 19.7), (2.8, 3.1), (17.9, 50.9)],
}


def make_synthetic(n_rows: int, seed: int, positive_fraction: float = 0.1) -> Dataset:
    """HTRU-2-shaped synthetic data; not a substitute for the real file."""
    rng = np.random.default_rng(seed)
    n_pos = max(2, int(round(positive_fraction * n_rows)))
    labels = np.array([1] * n_pos + [0] * (n_rows - n_pos))
    rng.shuffle(labels)
    X = np.empty((n_rows, len(FEATURE_NAMES)))
    for label, params in _SYNTH_PARAMS.items():
        idx = np.flatnonzero(labels == label)
        for j, (mu, sd) in enumerate(params):
            noise = rng.standard_t(3, idx.size) if label == 0 else rng.standard_normal(idx.size)
            X[idx, j] = mu + sd * noise
    return Dataset(X, labels)
