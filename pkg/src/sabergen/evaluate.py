"""Metrics over prediction dumps.

Every function is a plain recount over records, defined so an
independent brute-force implementation must agree exactly:

* accuracy = correct / total
* recall, per class with at least one gold instance = TP / gold count
* macro-F1 = mean over gold-present classes of 2TP / (2TP + FP + FN)
  (zero when a class is never predicted correctly)
* zone accuracy = accuracy restricted to in-zone / out-of-zone pitches,
  reported as absent (None) when the subset is empty
* consistency curve: for X = 1..max pitches per plate appearance, the
  fraction of plate appearances with at least X correct predictions
* arsenal breakdown: accuracy per arsenal-size bin {1, 2-3, 4-5, 6+}
* confusion matrix and per-class error counts
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EvaluationError
from .events import PitchType
from .predict import (
    DumpRecord,
    FASTBALL_LABEL,
    OFFSPEED_LABEL,
    PredictionTask,
    SWING_LABEL,
    TAKE_LABEL,
)

__all__ = [
    "ARSENAL_BINS",
    "accuracy",
    "recall_per_class",
    "macro_f1",
    "zone_accuracy",
    "consistency_curve",
    "arsenal_sizes",
    "arsenal_breakdown",
    "confusion_matrix",
    "error_counts",
    "EvalReport",
    "compute_report",
    "task_label_order",
]

ARSENAL_BINS = ("1", "2-3", "4-5", "6+")

PITCH_TYPE_LABELS = tuple(t.code for t in PitchType)


def _require(records: Sequence[DumpRecord]) -> None:
    if not records:
        raise EvaluationError("empty prediction dump")


def accuracy(records: Sequence[DumpRecord]) -> float:
    _require(records)
    return sum(r.predicted == r.gold for r in records) / len(records)


def recall_per_class(records: Sequence[DumpRecord]) -> dict[str, float]:
    _require(records)
    gold: dict[str, int] = {}
    correct: dict[str, int] = {}
    for r in records:
        gold[r.gold] = gold.get(r.gold, 0) + 1
        if r.predicted == r.gold:
            correct[r.gold] = correct.get(r.gold, 0) + 1
    return {c: correct.get(c, 0) / n for c, n in sorted(gold.items())}


def macro_f1(records: Sequence[DumpRecord]) -> float:
    """Macro-averaged F1 over classes that appear in the gold labels.

    Classes never predicted and absent from gold are excluded entirely;
    a gold-present class with zero true positives contributes F1 = 0.
    """
    _require(records)
    tp: dict[str, int] = {}
    fp: dict[str, int] = {}
    fn: dict[str, int] = {}
    gold_classes = set()
    for r in records:
        gold_classes.add(r.gold)
        if r.predicted == r.gold:
            tp[r.gold] = tp.get(r.gold, 0) + 1
        else:
            fp[r.predicted] = fp.get(r.predicted, 0) + 1
            fn[r.gold] = fn.get(r.gold, 0) + 1
    scores = []
    for c in sorted(gold_classes):
        t = tp.get(c, 0)
        denom = 2 * t + fp.get(c, 0) + fn.get(c, 0)
        scores.append(2 * t / denom if denom else 0.0)
    return sum(scores) / len(scores)


def zone_accuracy(
    records: Sequence[DumpRecord],
) -> tuple[Optional[float], Optional[float]]:
    """(in-zone accuracy, out-of-zone accuracy); None for empty subsets."""
    _require(records)
    out: list[Optional[float]] = []
    for flag in (True, False):
        subset = [r for r in records if r.in_zone == flag]
        out.append(accuracy(subset) if subset else None)
    return out[0], out[1]


def consistency_curve(records: Sequence[DumpRecord]) -> list[tuple[int, float]]:
    """Fraction of plate appearances with >= X correct predictions, for
    X = 1 .. max pitches per plate appearance."""
    _require(records)
    per_pa: dict[tuple[str, str], list[int]] = {}
    for r in records:
        per_pa.setdefault((r.game_id, r.pa_id), []).append(int(r.predicted == r.gold))
    n_pas = len(per_pa)
    correct_counts = [sum(v) for v in per_pa.values()]
    max_x = max(len(v) for v in per_pa.values())
    return [
        (x, sum(c >= x for c in correct_counts) / n_pas) for x in range(1, max_x + 1)
    ]


def arsenal_sizes(records: Sequence[DumpRecord], min_count: int = 5) -> dict[str, int]:
    """Arsenal size per pitcher from gold labels: distinct pitch types
    thrown at least ``min_count`` times in this dump."""
    _require(records)
    counts: dict[str, dict[str, int]] = {}
    for r in records:
        per = counts.setdefault(r.pitcher_id, {})
        per[r.gold] = per.get(r.gold, 0) + 1
    return {
        pid: sum(1 for n in per.values() if n >= min_count)
        for pid, per in sorted(counts.items())
    }


def _bin_of(size: int) -> Optional[str]:
    if size == 1:
        return "1"
    if 2 <= size <= 3:
        return "2-3"
    if 4 <= size <= 5:
        return "4-5"
    if size >= 6:
        return "6+"
    return None  # size 0: pitcher with no established pitch


def arsenal_breakdown(
    records: Sequence[DumpRecord], sizes: dict[str, int]
) -> dict[str, tuple[float, int]]:
    """Accuracy and sample count per arsenal-size bin; empty bins absent."""
    _require(records)
    hit: dict[str, int] = {}
    tot: dict[str, int] = {}
    for r in records:
        bin_name = _bin_of(sizes.get(r.pitcher_id, 0))
        if bin_name is None:
            continue
        tot[bin_name] = tot.get(bin_name, 0) + 1
        hit[bin_name] = hit.get(bin_name, 0) + int(r.predicted == r.gold)
    return {b: (hit.get(b, 0) / tot[b], tot[b]) for b in ARSENAL_BINS if b in tot}


def confusion_matrix(
    records: Sequence[DumpRecord], labels: Optional[Sequence[str]] = None
) -> tuple[np.ndarray, tuple[str, ...]]:
    """Counts indexed [gold, predicted] over a fixed label order."""
    _require(records)
    if labels is None:
        labels = PITCH_TYPE_LABELS
    labels = tuple(labels)
    index = {c: i for i, c in enumerate(labels)}
    matrix = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for r in records:
        try:
            matrix[index[r.gold], index[r.predicted]] += 1
        except KeyError as exc:
            raise EvaluationError(f"label {exc.args[0]!r} outside the label set") from None
    return matrix, labels


def error_counts(
    records: Sequence[DumpRecord], labels: Optional[Sequence[str]] = None
) -> dict[str, int]:
    """Misclassified instances per gold class (gold count minus diagonal)."""
    matrix, labels = confusion_matrix(records, labels)
    return {
        c: int(matrix[i].sum() - matrix[i, i])
        for i, c in enumerate(labels)
        if matrix[i].sum()
    }


def task_label_order(task: str) -> tuple[str, ...]:
    if task == PredictionTask.PITCH_TYPE_MULTI.value:
        return PITCH_TYPE_LABELS
    if task == PredictionTask.PITCH_TYPE_BINARY.value:
        return (FASTBALL_LABEL, OFFSPEED_LABEL)
    if task == PredictionTask.SWING_DECISION.value:
        return (TAKE_LABEL, SWING_LABEL)
    raise EvaluationError(f"unknown task {task!r}")


@dataclass
class EvalReport:
    """Everything computable from one task's dump."""

    task: str
    n_instances: int
    accuracy: float
    recall: dict[str, float]
    macro_f1: float
    iz_accuracy: Optional[float] = None
    oz_accuracy: Optional[float] = None
    consistency: list[tuple[int, float]] = field(default_factory=list)
    arsenal: dict[str, tuple[float, int]] = field(default_factory=dict)
    confusion: Optional[np.ndarray] = None
    confusion_labels: tuple[str, ...] = ()
    errors: dict[str, int] = field(default_factory=dict)


def compute_report(records: Sequence[DumpRecord]) -> EvalReport:
    """Dispatch the metric families appropriate to the dump's task."""
    _require(records)
    tasks = {r.task for r in records}
    if len(tasks) != 1:
        raise EvaluationError(f"dump mixes tasks: {sorted(tasks)}")
    task = records[0].task
    report = EvalReport(
        task=task,
        n_instances=len(records),
        accuracy=accuracy(records),
        recall=recall_per_class(records),
        macro_f1=macro_f1(records),
    )
    if task == PredictionTask.SWING_DECISION.value:
        report.iz_accuracy, report.oz_accuracy = zone_accuracy(records)
    if task in (PredictionTask.PITCH_TYPE_MULTI.value, PredictionTask.PITCH_TYPE_BINARY.value):
        report.consistency = consistency_curve(records)
        if task == PredictionTask.PITCH_TYPE_MULTI.value:
            report.arsenal = arsenal_breakdown(records, arsenal_sizes(records))
            report.confusion, report.confusion_labels = confusion_matrix(records)
            report.errors = error_counts(records)
    return report
