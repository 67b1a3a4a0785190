"""Window-level evaluation: one-vs-rest counts, precision/recall/F1, macro
averages, confidence intervals over repeated runs, and the focal loss.

``e0`` is scored like any other class, with a window counting as ``e0`` iff its
label set is empty. "All" averages over e0..e3, "Pos." over e1..e3.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .fsm import labels_from_mask
from .vocab import CE_CLASSES, CeClass

N_CE = len(CE_CLASSES)
Z95 = 1.96

# label set -> 4-bit window code: bit 0 = e0 (empty set), bit c = class c
_CODE_OF = {labels_from_mask(m): (m << 1) if m else 1 for m in range(8)}


def _window_codes(seqs: Iterable[Sequence[frozenset]]) -> np.ndarray:
    code = _CODE_OF
    return np.fromiter((code[s] for seq in seqs for s in seq), dtype=np.uint8)


@dataclass
class ConfusionCounts:
    tp: np.ndarray = field(default_factory=lambda: np.zeros(N_CE, dtype=np.int64))
    fp: np.ndarray = field(default_factory=lambda: np.zeros(N_CE, dtype=np.int64))
    fn: np.ndarray = field(default_factory=lambda: np.zeros(N_CE, dtype=np.int64))

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfusionCounts):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k)) for k in ("tp", "fp", "fn"))

    def get(self, c: CeClass) -> tuple[int, int, int]:
        return int(self.tp[c]), int(self.fp[c]), int(self.fn[c])


def count_confusion(pred: Sequence[frozenset], truth: Sequence[frozenset]) -> ConfusionCounts:
    """One-vs-rest window counts for a single pair of label sequences."""
    if len(pred) != len(truth):
        raise ValueError(f"length mismatch: {len(pred)} predicted vs {len(truth)} true windows")
    return _count_codes(_window_codes([pred]), _window_codes([truth]))


def count_dataset(preds: Sequence[Sequence[frozenset]], truths: Sequence[Sequence[frozenset]]) -> ConfusionCounts:
    """Accumulate counts over paired examples."""
    if len(preds) != len(truths):
        raise ValueError(f"{len(preds)} predicted examples vs {len(truths)} true examples")
    for i, (p, t) in enumerate(zip(preds, truths)):
        if len(p) != len(t):
            raise ValueError(f"example {i}: length mismatch {len(p)} vs {len(t)}")
    return _count_codes(_window_codes(preds), _window_codes(truths))


def _count_codes(p: np.ndarray, t: np.ndarray) -> ConfusionCounts:
    bits = np.arange(N_CE, dtype=np.uint8)
    pb = (p[:, None] >> bits) & 1
    tb = (t[:, None] >> bits) & 1
    tp = (pb & tb).sum(axis=0)
    fp = (pb & (1 - tb)).sum(axis=0)
    fn = ((1 - pb) & tb).sum(axis=0)
    return ConfusionCounts(tp.astype(np.int64), fp.astype(np.int64), fn.astype(np.int64))


def _ratio(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def f1_score(precision, recall):
    precision = np.asarray(precision, dtype=float)
    recall = np.asarray(recall, dtype=float)
    return _ratio(2 * precision * recall, precision + recall)


METRIC_NAMES = (
    *(f"{m}_{c.label}" for c in CE_CLASSES for m in ("precision", "recall", "f1")),
    "precision_avg", "recall_avg", "f1_all", "precision_pos", "recall_pos", "f1_pos",
)


@dataclass
class MetricsReport:
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    runs: int = 1
    ci: dict[str, float] = field(default_factory=dict)

    @property
    def precision_avg(self) -> float:
        return float(self.precision.mean())

    @property
    def recall_avg(self) -> float:
        return float(self.recall.mean())

    @property
    def f1_all(self) -> float:
        return float(self.f1.mean())

    @property
    def precision_pos(self) -> float:
        return float(self.precision[1:].mean())

    @property
    def recall_pos(self) -> float:
        return float(self.recall[1:].mean())

    @property
    def f1_pos(self) -> float:
        return float(self.f1[1:].mean())

    def as_dict(self) -> dict[str, float]:
        """Flat metric name -> value mapping (names as in the report file)."""
        out = {}
        for c in CE_CLASSES:
            out[f"precision_{c.label}"] = float(self.precision[c])
            out[f"recall_{c.label}"] = float(self.recall[c])
            out[f"f1_{c.label}"] = float(self.f1[c])
        out.update(
            precision_avg=self.precision_avg,
            recall_avg=self.recall_avg,
            f1_all=self.f1_all,
            precision_pos=self.precision_pos,
            recall_pos=self.recall_pos,
            f1_pos=self.f1_pos,
        )
        return out


def precision_recall_f1(counts: ConfusionCounts) -> MetricsReport:
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    recall = _ratio(counts.tp, counts.tp + counts.fn)
    return MetricsReport(precision, recall, f1_score(precision, recall))


def ci95(values: Sequence[float]) -> tuple[float, float]:
    """Mean and normal-approximation 95% half-width, ``1.96 * s / sqrt(n)``."""
    values = [float(v) for v in values]
    if not values:
        raise ValueError("ci95 needs at least one value")
    mean = statistics.fmean(values)
    if len(values) == 1:
        return mean, 0.0
    return mean, Z95 * statistics.stdev(values) / math.sqrt(len(values))


def aggregate(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Mean of per-run metrics with 95% CI half-widths keyed like ``as_dict``."""
    if not reports:
        raise ValueError("no reports to aggregate")
    if len(reports) == 1:
        return reports[0]
    precision = np.mean([r.precision for r in reports], axis=0)
    recall = np.mean([r.recall for r in reports], axis=0)
    f1 = np.mean([r.f1 for r in reports], axis=0)
    dicts = [r.as_dict() for r in reports]
    ci = {k: ci95([d[k] for d in dicts])[1] for k in dicts[0]}
    return MetricsReport(precision, recall, f1, runs=len(reports), ci=ci)


# -- focal loss -----------------------------------------------------------------

DEFAULT_GAMMA = 2.0
DEFAULT_ALPHA = (0.005, 0.45, 0.45, 0.45)
_PRIORITY = (CeClass.E1, CeClass.E2, CeClass.E3)


def single_class_targets(labels: Sequence[frozenset]) -> np.ndarray:
    """Reduce label sets to one class per window; multi-label windows keep the
    highest-priority class (e1 > e2 > e3), empty sets become e0."""
    out = np.zeros(len(labels), dtype=np.intp)
    for t, s in enumerate(labels):
        for c in _PRIORITY:
            if c in s:
                out[t] = c
                break
    return out


def focal_loss(
    probs,
    targets,
    gamma: float = DEFAULT_GAMMA,
    alpha: Sequence[float] = DEFAULT_ALPHA,
) -> float:
    """Summed focal loss ``-sum alpha_y (1 - p_y)**gamma * log(p_y)``.

    Parameters
    ----------
    probs : array_like, shape (..., T, K)
        Per-window class probabilities.
    targets : array_like of int, shape (..., T), or a sequence of label-set sequences
        True class per window. Label sets are reduced with :func:`single_class_targets`.
    gamma : float
        Focusing exponent.
    alpha : sequence of float, length K
        Per-class weights.
    """
    probs = np.asarray(probs, dtype=float)
    if probs.ndim < 2:
        raise ValueError("probs must have shape (..., T, K)")
    targets = _as_targets(targets, probs.shape[:-1])
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (probs.shape[-1],):
        raise ValueError(f"alpha must have length {probs.shape[-1]}")
    if np.any((probs < 0) | (probs > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    p_true = np.take_along_axis(probs, targets[..., None], axis=-1)[..., 0]
    if np.any(p_true <= 0):
        raise ValueError("zero probability assigned to a true class; focal loss is infinite")
    w = alpha[targets]
    return float(-(w * (1.0 - p_true) ** gamma * np.log(p_true)).sum())


def _as_targets(targets, shape) -> np.ndarray:
    if isinstance(targets, np.ndarray) and np.issubdtype(targets.dtype, np.integer):
        arr = targets
    else:
        items = list(targets)
        if items and isinstance(items[0], frozenset):
            arr = single_class_targets(items)
        elif items and isinstance(items[0], (list, tuple)) and items[0] and isinstance(items[0][0], frozenset):
            arr = np.stack([single_class_targets(s) for s in items])
        else:
            arr = np.asarray(items, dtype=np.intp)
    arr = np.asarray(arr, dtype=np.intp)
    if arr.shape != tuple(shape):
        raise ValueError(f"targets shape {arr.shape} does not match probs {tuple(shape)}")
    return arr


# -- report file ----------------------------------------------------------------

REPORT_COLUMNS = ("model", "class", "precision", "recall", "f1", "precision_ci", "recall_ci", "f1_ci", "runs")
REPORT_ROWS = ("e0", "e1", "e2", "e3", "avg", "pos")


def report_rows(report: MetricsReport, model: str = "fsm") -> list[dict[str, object]]:
    """Rows e0..e3 per class, ``avg`` (macro over 4 classes, f1 = F1 All) and
    ``pos`` (macro over e1..e3, f1 = F1 Pos)."""
    d = report.as_dict()
    rows = []
    for name in REPORT_ROWS:
        if name == "avg":
            keys = ("precision_avg", "recall_avg", "f1_all")
        elif name == "pos":
            keys = ("precision_pos", "recall_pos", "f1_pos")
        else:
            keys = (f"precision_{name}", f"recall_{name}", f"f1_{name}")
        row: dict[str, object] = {"model": model, "class": name}
        for col, key in zip(("precision", "recall", "f1"), keys):
            row[col] = d[key]
            row[col + "_ci"] = report.ci.get(key, 0.0)
        row["runs"] = report.runs
        rows.append(row)
    return rows


def write_report(reports: Mapping[str, MetricsReport] | MetricsReport, path: str | Path) -> None:
    if isinstance(reports, MetricsReport):
        reports = {"fsm": reports}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for model, rep in reports.items():
            for row in report_rows(rep, model):
                writer.writerow({k: _fmt(v) for k, v in row.items()})


def read_report(path: str | Path) -> list[dict[str, object]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
            raise ValueError(f"{path}: unexpected report columns {reader.fieldnames}")
        rows = []
        for row in reader:
            out: dict[str, object] = {"model": row["model"], "class": row["class"], "runs": int(row["runs"])}
            for col in REPORT_COLUMNS[2:-1]:
                out[col] = float(row[col])
            rows.append(out)
    return rows


def _fmt(v):
    return f"{v:.6f}" if isinstance(v, float) else v
