"""Binary classification metrics with pulsars (label 1) as the positive class.

Zero denominators give 0 for the affected metric; MCC is 0 whenever any
of its four marginals is empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    mcc: float

    def rounded(self, digits: int = 3) -> tuple[float, ...]:
        return tuple(round(v, digits) for v in (self.accuracy, self.precision, self.recall, self.f1, self.mcc))


def confusion(y_true, y_pred) -> ConfusionCounts:
    t = np.asarray(y_true).reshape(-1)
    p = np.asarray(y_pred).reshape(-1)
    if t.size != p.size or t.size == 0:
        raise ValueError("label vectors must be non-empty and of equal length")
    if not (np.isin(t, (0, 1)).all() and np.isin(p, (0, 1)).all()):
        raise ValueError("labels must be 0 or 1")
    t, p = t.astype(bool), p.astype(bool)
    return ConfusionCounts(
        tp=int(np.sum(t & p)), fp=int(np.sum(~t & p)), fn=int(np.sum(t & ~p)), tn=int(np.sum(~t & ~p))
    )


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def report(c: ConfusionCounts) -> MetricsReport:
    if c.total == 0:
        raise ValueError("cannot score an empty confusion matrix")
    precision = _ratio(c.tp, c.tp + c.fp)
    recall = _ratio(c.tp, c.tp + c.fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    den = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn)
    mcc = (c.tp * c.tn - c.fp * c.fn) / math.sqrt(den) if den else 0.0
    return MetricsReport(
        accuracy=(c.tp + c.tn) / c.total,
        precision=precision,
        recall=recall,
        f1=f1,
        mcc=max(-1.0, min(1.0, mcc)),
    )


def evaluate(y_true, y_pred) -> tuple[ConfusionCounts, MetricsReport]:
    c = confusion(y_true, y_pred)
    return c, report(c)
