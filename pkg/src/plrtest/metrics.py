"""Detection-performance evaluation: confusion counts, ROC/AUC, operating
point selection, and F-scores over a labeled manifest of index scores.

Predictions use the strict rule ``score > threshold`` everywhere, matching
the classification direction of the dissimilarity index.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import LengthMismatchError, SingleClassError, UndefinedRateError

F_BETAS = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fn: int
    tn: int
    fp: int

    @property
    def p(self) -> int:
        return self.tp + self.fn

    @property
    def n(self) -> int:
        return self.tn + self.fp

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.tn + self.fp


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    fpr: float
    tpr: float


@dataclass(frozen=True)
class EvalReport:
    config_id: str
    counts: ConfusionCounts
    sensitivity: float
    specificity: float
    precision: float
    auc: float
    f_scores: dict[float, float]
    roc: list[RocPoint]
    operating_threshold: float

    def to_dict(self) -> dict:
        return {
            "config_id": self.config_id,
            "counts": {"tp": self.counts.tp, "fn": self.counts.fn,
                       "tn": self.counts.tn, "fp": self.counts.fp},
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "precision": self.precision,
            "auc": self.auc,
            "f_scores": {str(b): v for b, v in self.f_scores.items()},
            "operating_threshold": self.operating_threshold,
            "roc": [{"threshold": p.threshold, "fpr": p.fpr, "tpr": p.tpr}
                    for p in self.roc],
        }


def confusion(scores: list[float], labels: list[bool], threshold: float) -> ConfusionCounts:
    """Tally predictions (positive iff score > threshold) against labels."""
    if len(scores) != len(labels):
        raise LengthMismatchError(f"{len(scores)} scores vs {len(labels)} labels")
    if not scores:
        raise LengthMismatchError("empty manifest")
    tp = fn = tn = fp = 0
    for s, y in zip(scores, labels):
        pred = s > threshold
        if y:
            tp, fn = (tp + 1, fn) if pred else (tp, fn + 1)
        else:
            fp, tn = (fp + 1, tn) if pred else (fp, tn + 1)
    return ConfusionCounts(tp=tp, fn=fn, tn=tn, fp=fp)


def sensitivity(c: ConfusionCounts) -> float:
    if c.p == 0:
        raise UndefinedRateError("sensitivity undefined: no positive cases")
    return c.tp / c.p


def specificity(c: ConfusionCounts) -> float:
    if c.n == 0:
        raise UndefinedRateError("specificity undefined: no negative cases")
    return c.tn / c.n


def precision(c: ConfusionCounts) -> float:
    if c.tp + c.fp == 0:
        raise UndefinedRateError("precision undefined: no predicted positives")
    return c.tp / (c.tp + c.fp)


def rates(c: ConfusionCounts) -> tuple[float, float, float]:
    """(sensitivity, specificity, precision); raises UndefinedRateError naming
    the field whose denominator is zero."""
    return sensitivity(c), specificity(c), precision(c)


def roc_curve(scores: list[float], labels: list[bool]) -> list[RocPoint]:
    """ROC points swept over every distinct score plus sentinels, sorted by
    (fpr, tpr), deduplicated, spanning (0,0) to (1,1)."""
    scores = [float(s) for s in scores]
    labels = [bool(y) for y in labels]
    if len(scores) != len(labels) or not scores:
        raise LengthMismatchError(f"{len(scores)} scores vs {len(labels)} labels")
    p = sum(labels)
    n = len(labels) - p
    if p == 0 or n == 0:
        raise SingleClassError("ROC needs both a positive and a negative case")
    distinct = sorted(set(scores), reverse=True)
    thresholds = [distinct[0] + 1.0] + distinct + [distinct[-1] - 1.0]
    seen: dict[tuple[float, float], float] = {}
    for t in thresholds:
        tp = sum(1 for s, y in zip(scores, labels) if y and s > t)
        fp = sum(1 for s, y in zip(scores, labels) if not y and s > t)
        key = (fp / n, tp / p)
        # identical operating characteristics collapse to the lowest threshold
        if key not in seen or t < seen[key]:
            seen[key] = t
    return [RocPoint(threshold=seen[k], fpr=k[0], tpr=k[1])
            for k in sorted(seen)]


def auc(roc: list[RocPoint]) -> float:
    """Trapezoidal area under the ROC curve."""
    area = 0.0
    for a, b in zip(roc, roc[1:]):
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0
    return float(min(max(area, 0.0), 1.0))


def operating_point(roc: list[RocPoint]) -> RocPoint:
    """Point maximizing Youden's J = tpr - fpr (ties: higher tpr, then lower
    threshold)."""
    if not roc:
        raise ValueError("empty ROC")
    return max(roc, key=lambda pt: (pt.tpr - pt.fpr, pt.tpr, -pt.threshold))


def f_beta(precision_value: float, recall: float, beta: float) -> float:
    """Weighted precision/recall combination:
    (1 + b^2) * P * R / (b^2 * P + R)."""
    _check_f_inputs(precision_value, recall, beta)
    denom = beta * beta * precision_value + recall
    if denom == 0.0:
        raise UndefinedRateError("f_beta undefined: precision and recall both zero")
    return (1.0 + beta * beta) * precision_value * recall / denom


def f_beta_table_variant(precision_value: float, recall: float, beta: float) -> float:
    """Variant denominator b^2 * (P + R); kept because some reported
    F_0.5 / F_2 scores this harness reproduces follow this form."""
    _check_f_inputs(precision_value, recall, beta)
    denom = beta * beta * (precision_value + recall)
    if denom == 0.0:
        raise UndefinedRateError("f_beta undefined: precision and recall both zero")
    return (1.0 + beta * beta) * precision_value * recall / denom


def _check_f_inputs(p: float, r: float, beta: float) -> None:
    if not (0.0 <= p <= 1.0 and 0.0 <= r <= 1.0):
        raise ValueError("precision and recall must lie in [0, 1]")
    if beta <= 0:
        raise ValueError("beta must be positive")


def evaluate_manifest(manifest: list[tuple[float, bool]], config_id: str,
                      f_variant: bool = False) -> EvalReport:
    """Full report: ROC, AUC, Youden operating point, rates and F-scores there."""
    scores = [float(s) for s, _ in manifest]
    labels = [bool(y) for _, y in manifest]
    roc = roc_curve(scores, labels)
    op = operating_point(roc)
    c = confusion(scores, labels, op.threshold)
    sens, spec, prec = rates(c)
    f_fn = f_beta_table_variant if f_variant else f_beta
    return EvalReport(
        config_id=config_id,
        counts=c,
        sensitivity=sens,
        specificity=spec,
        precision=prec,
        auc=auc(roc),
        f_scores={b: f_fn(prec, sens, b) for b in F_BETAS},
        roc=roc,
        operating_threshold=op.threshold,
    )


def save_report_json(report: EvalReport, path: str | Path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=2) + "\n")


def save_roc_csv(roc: list[RocPoint], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "fpr", "tpr"])
        for pt in roc:
            writer.writerow([f"{pt.threshold:.6f}", f"{pt.fpr:.6f}", f"{pt.tpr:.6f}"])


def save_score_manifest(rows: list[tuple[str, float, bool]], path: str | Path) -> None:
    """Write the scoring manifest: case_id,score,label with label in {0,1}."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["case_id", "score", "label"])
        for case_id, score, label in rows:
            writer.writerow([case_id, f"{score:.6f}", int(label)])


def load_score_manifest(path: str | Path) -> list[tuple[str, float, bool]]:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append((row["case_id"], float(row["score"]),
                         row["label"].strip() in ("1", "true", "True")))
    return rows
