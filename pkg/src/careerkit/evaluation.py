"""Multiclass evaluation: confusion matrices, accuracy, precision/recall/F1,
macro and weighted averages, and micro one-vs-rest confusion counts.

All metrics follow the standard single-label multiclass definitions with the
zero-division convention "0, flagged": a class that is never predicted gets
precision 0 and shows up in the report's ``zero_division`` list rather than
raising.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import UndefinedMetricError

__all__ = [
    "ConfusionCounts",
    "ConfusionMatrix",
    "EvaluationReport",
    "accuracy",
    "build_report",
    "confusion",
    "f1_per_class",
    "macro_avg",
    "micro_ovr_counts",
    "precision_per_class",
    "recall_per_class",
    "weighted_avg",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    """grid[i, j] = number of items of true class i predicted as class j."""

    grid: np.ndarray
    n_classes: int

    @property
    def total(self) -> int:
        return int(self.grid.sum())

    @property
    def supports(self) -> np.ndarray:
        return self.grid.sum(axis=1)


def confusion(y_true, y_pred, n_classes: int) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.size and (y_true.min() < 0 or y_true.max() >= n_classes
                        or y_pred.min() < 0 or y_pred.max() >= n_classes):
        raise ValueError(f"class codes must lie in [0, {n_classes})")
    grid = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(grid, (y_true, y_pred), 1)
    return ConfusionMatrix(grid, n_classes)


def accuracy(cm: ConfusionMatrix) -> float:
    """Correct over total."""
    if cm.total == 0:
        raise UndefinedMetricError("accuracy of an empty confusion matrix")
    return float(np.trace(cm.grid)) / cm.total


def _per_class(cm: ConfusionMatrix, denominator: np.ndarray,
               ) -> tuple[np.ndarray, list[int]]:
    diag = np.diag(cm.grid).astype(np.float64)
    values = np.zeros(cm.n_classes, dtype=np.float64)
    flagged = []
    for c in range(cm.n_classes):
        if denominator[c] == 0:
            flagged.append(c)
        else:
            values[c] = diag[c] / denominator[c]
    return values, flagged


def precision_per_class(cm: ConfusionMatrix) -> np.ndarray:
    return _per_class(cm, cm.grid.sum(axis=0))[0]


def recall_per_class(cm: ConfusionMatrix) -> np.ndarray:
    return _per_class(cm, cm.grid.sum(axis=1))[0]


def f1_per_class(cm: ConfusionMatrix) -> np.ndarray:
    p = precision_per_class(cm)
    r = recall_per_class(cm)
    f1 = np.zeros_like(p)
    nonzero = (p + r) > 0
    f1[nonzero] = 2.0 * p[nonzero] * r[nonzero] / (p[nonzero] + r[nonzero])
    return f1


def macro_avg(per_class: np.ndarray) -> float:
    return float(np.mean(per_class))


def weighted_avg(per_class: np.ndarray, supports: np.ndarray) -> float:
    supports = np.asarray(supports, dtype=np.float64)
    total = supports.sum()
    if total == 0:
        raise UndefinedMetricError("weighted average with zero total support")
    return float(np.dot(per_class, supports) / total)


@dataclass(frozen=True)
class ConfusionCounts:
    """Micro-aggregated one-vs-rest counts over all classes (Table-style)."""

    tp: int
    fp: int
    tn: int
    fn: int


def micro_ovr_counts(cm: ConfusionMatrix) -> ConfusionCounts:
    """Sum TP/FP/TN/FN over the C one-vs-rest binarizations.

    For single-label data this collapses to TP = trace, FP = FN = N - trace,
    TN = N*(C-1) - FP.
    """
    n = cm.total
    if n == 0:
        raise UndefinedMetricError("counts of an empty confusion matrix")
    tp = int(np.trace(cm.grid))
    fp = n - tp
    fn = n - tp
    tn = n * (cm.n_classes - 1) - fp
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


@dataclass(frozen=True)
class EvaluationReport:
    model: str
    labels: list[str]
    matrix: ConfusionMatrix
    accuracy: float
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    supports: np.ndarray
    macro: dict[str, float]
    weighted: dict[str, float]
    counts: ConfusionCounts
    zero_division: list[tuple[int, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "labels": list(self.labels),
            "confusion_matrix": self.matrix.grid.tolist(),
            "accuracy": self.accuracy,
            "per_class": {
                label: {
                    "precision": float(self.precision[i]),
                    "recall": float(self.recall[i]),
                    "f1": float(self.f1[i]),
                    "support": int(self.supports[i]),
                }
                for i, label in enumerate(self.labels)
            },
            "macro_avg": dict(self.macro),
            "weighted_avg": dict(self.weighted),
            "counts": {"tp": self.counts.tp, "fp": self.counts.fp,
                       "tn": self.counts.tn, "fn": self.counts.fn},
            "zero_division": [{"class": c, "metric": m}
                              for c, m in self.zero_division],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        """Aligned-column table: accuracy, per-class metrics, counts."""
        width = max(len(label) for label in self.labels)
        lines = [
            f"model: {self.model}",
            f"accuracy: {self.accuracy:.4f}  "
            f"(TP={self.counts.tp} FP={self.counts.fp} "
            f"TN={self.counts.tn} FN={self.counts.fn})",
            "",
            f"{'label':<{width}}  precision  recall  f1      support",
        ]
        for i, label in enumerate(self.labels):
            lines.append(f"{label:<{width}}  {self.precision[i]:9.4f}  "
                         f"{self.recall[i]:6.4f}  {self.f1[i]:6.4f}  "
                         f"{int(self.supports[i]):7d}")
        lines.append("")
        lines.append(f"{'macro avg':<{width}}  {self.macro['precision']:9.4f}  "
                     f"{self.macro['recall']:6.4f}  {self.macro['f1']:6.4f}  "
                     f"{int(self.supports.sum()):7d}")
        lines.append(f"{'weighted avg':<{width}}  "
                     f"{self.weighted['precision']:9.4f}  "
                     f"{self.weighted['recall']:6.4f}  "
                     f"{self.weighted['f1']:6.4f}  {int(self.supports.sum()):7d}")
        if self.zero_division:
            flags = ", ".join(f"{self.labels[c]}:{m}" for c, m in self.zero_division)
            lines.append(f"zero-division fallback used for: {flags}")
        return "\n".join(lines) + "\n"


def build_report(y_true, y_pred, labels: list[str], model: str) -> EvaluationReport:
    """Assemble the full per-model report from raw predictions."""
    cm = confusion(y_true, y_pred, len(labels))
    if cm.total == 0:
        raise UndefinedMetricError("cannot evaluate zero test documents")
    precision, p_flags = _per_class(cm, cm.grid.sum(axis=0))
    recall, r_flags = _per_class(cm, cm.grid.sum(axis=1))
    f1 = f1_per_class(cm)
    supports = cm.supports
    zero_division = [(c, "precision") for c in p_flags]
    zero_division += [(c, "recall") for c in r_flags]
    macro = {"precision": macro_avg(precision), "recall": macro_avg(recall),
             "f1": macro_avg(f1)}
    weighted = {"precision": weighted_avg(precision, supports),
                "recall": weighted_avg(recall, supports),
                "f1": weighted_avg(f1, supports)}
    return EvaluationReport(
        model=model, labels=list(labels), matrix=cm,
        accuracy=accuracy(cm), precision=precision, recall=recall, f1=f1,
        supports=supports, macro=macro, weighted=weighted,
        counts=micro_ovr_counts(cm), zero_division=zero_division)
