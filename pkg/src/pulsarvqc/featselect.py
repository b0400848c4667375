"""Feature ranking by ANOVA F-score (FS1) and by |Pearson r| with the
class label (FS2)."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataio import DataError, Dataset


class Method(str, Enum):
    FS1 = "FS1"
    FS2 = "FS2"

    @classmethod
    def parse(cls, value: "Method | str") -> "Method":
        try:
            return cls(str(getattr(value, "value", value)).upper())
        except ValueError:
            raise ValueError(f"unknown selection method {value!r}") from None


class UndefinedCorrelation(ValueError):
    pass


@dataclass(frozen=True)
class FeatureRanking:
    method: Method
    ordered_features: tuple[str, ...]
    scores: dict[str, float]

    def top(self, k: int) -> tuple[str, ...]:
        return self.ordered_features[:k]


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("pearson needs two equal-length vectors of length >= 2")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = dx @ dx, dy @ dy
    if sxx == 0 or syy == 0:
        raise UndefinedCorrelation("correlation is undefined for a constant vector")
    r = (dx @ dy) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def correlation_matrix(data: Dataset) -> np.ndarray:
    if len(data) < 2:
        raise DataError("need at least two rows")
    k = data.n_features
    m = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            m[i, j] = m[j, i] = pearson(data.features[:, i], data.features[:, j])
    return m


def class_correlations(data: Dataset) -> np.ndarray:
    return np.array([pearson(data.features[:, j], data.labels) for j in range(data.n_features)])


def anova_f_scores(data: Dataset) -> np.ndarray:
    """One-way ANOVA F per column across the two classes.

    Columns with zero within-class variance but separated means score
    ``inf``; columns with no variance at all score 0.
    """
    X, y = data.features, data.labels
    groups = [X[y == c] for c in (0, 1)]
    if any(len(g) < 2 for g in groups):
        raise DataError("ANOVA needs at least two rows of each class")
    n, k = X.shape[0], len(groups)
    grand = X.mean(axis=0)
    between = sum(len(g) * (g.mean(axis=0) - grand) ** 2 for g in groups) / (k - 1)
    within = sum(((g - g.mean(axis=0)) ** 2).sum(axis=0) for g in groups) / (n - k)
    with np.errstate(divide="ignore", invalid="ignore"):
        f = between / within
    f = np.where(within > 0, f, np.where(between > 0, np.inf, 0.0))
    return f


def rank(data: Dataset, method: Method | str) -> FeatureRanking:
    method = Method.parse(method)
    scores = anova_f_scores(data) if method is Method.FS1 else np.abs(class_correlations(data))
    # stable sort keeps column order among ties
    order = sorted(range(data.n_features), key=lambda j: -scores[j])
    names = tuple(data.feature_names[j] for j in order)
    return FeatureRanking(method, names, {data.feature_names[j]: float(scores[j]) for j in range(data.n_features)})


def select(data: Dataset, ranking: FeatureRanking, k: int) -> Dataset:
    if not 1 <= k <= len(ranking.ordered_features):
        raise ValueError(f"k must be in [1, {len(ranking.ordered_features)}], got {k}")
    return data.columns(ranking.top(k))


def matrix_csv(names, matrix: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["", *names])
    for name, row in zip(names, matrix):
        w.writerow([name, *(f"{v:.6f}" for v in row)])
    return buf.getvalue()


def rankings_csv(*rankings: FeatureRanking) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["position", *(f"{r.method.value}" for r in rankings), *(f"{r.method.value}_score" for r in rankings)])
    for pos in range(len(rankings[0].ordered_features)):
        names = [r.ordered_features[pos] for r in rankings]
        scores = [f"{r.scores[n]:.6g}" for r, n in zip(rankings, names)]
        w.writerow([pos + 1, *names, *scores])
    return buf.getvalue()
