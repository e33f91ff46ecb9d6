"""Confusion-matrix scoring and per-variant metric reporting.

Metrics are percentages to two decimals: accuracy = (tp+tn)/total,
precision = tp/(tp+fp), recall = tp/(tp+fn), F1 = harmonic mean of precision
and recall. Every zero denominator yields 0.0 rather than an error.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable

from .datagen import POS, LabeledPair
from .errors import JoinError, ParseError, ValidationError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsReport:
    predictor: str
    dataset: str
    accuracy: float
    precision: float
    recall: float
    f1: float

    def values(self) -> tuple[float, float, float, float]:
        return (self.accuracy, self.precision, self.recall, self.f1)


def score_predictions(
    labels: Iterable[LabeledPair], preds: Iterable[tuple[str, str, int]]
) -> ConfusionMatrix:
    """Join predictions to labeled pairs on (anchor, other) and count.

    Every labeled pair must receive exactly one prediction; a missing,
    duplicate, or unknown prediction raises rather than being skipped.
    """
    expected: dict[tuple[str, str], bool] = {}
    for p in labels:
        expected[(p.anchor, p.other)] = p.label == POS

    tp = fp = fn = tn = 0
    seen: set[tuple[str, str]] = set()
    for anchor, other, pred in preds:
        key = (anchor, other)
        if key not in expected:
            raise JoinError(f"prediction for unlabeled pair {anchor}|{other}")
        if key in seen:
            raise JoinError(f"duplicate prediction for pair {anchor}|{other}")
        seen.add(key)
        is_pos = expected[key]
        if pred not in (0, 1):
            raise JoinError(f"prediction for {anchor}|{other} must be 0 or 1, got {pred!r}")
        if pred == 1:
            tp += is_pos
            fp += not is_pos
        else:
            fn += is_pos
            tn += not is_pos
    if len(seen) != len(expected):
        first = next(k for k in expected if k not in seen)
        raise JoinError(f"no prediction for labeled pair {first[0]}|{first[1]}")
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def metrics(cm: ConfusionMatrix, predictor: str = "", dataset: str = "") -> MetricsReport:
    if cm.total <= 0:
        raise ValidationError("cannot compute metrics of an empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport(
        predictor=predictor,
        dataset=dataset,
        accuracy=round(accuracy * 100, 2),
        precision=round(precision * 100, 2),
        recall=round(recall * 100, 2),
        f1=round(f1 * 100, 2),
    )


_COLUMNS = ("accuracy", "precision", "recall", "f1")


def render_report(reports: list[MetricsReport]) -> str:
    """Aligned text table: one row per predictor, one four-column group per
    dataset (datasets ordered by first appearance)."""
    datasets: list[str] = []
    predictors: list[str] = []
    for r in reports:
        if r.dataset not in datasets:
            datasets.append(r.dataset)
        if r.predictor not in predictors:
            predictors.append(r.predictor)
    by_key = {(r.predictor, r.dataset): r for r in reports}

    name_w = max([len(p) for p in predictors] + [len("predictor")])
    col_w = 10
    group_w = col_w * len(_COLUMNS)
    lines = []
    header1 = " " * name_w + " "
    header1 += "".join(f"{d:>{group_w}}" for d in datasets)
    lines.append(header1)
    header2 = f"{'predictor':<{name_w}} "
    header2 += "".join(f"{c:>{col_w}}" for _ in datasets for c in _COLUMNS)
    lines.append(header2)
    for p in predictors:
        row = f"{p:<{name_w}} "
        for d in datasets:
            r = by_key.get((p, d))
            if r is None:
                row += " " * group_w
            else:
                row += "".join(f"{v:>{col_w}.2f}" for v in r.values())
        lines.append(row)
    return "\n".join(lines) + "\n"


def to_csv(reports: list[MetricsReport]) -> str:
    buf = io.StringIO()
    buf.write("predictor,dataset,accuracy,precision,recall,f1\n")
    for r in reports:
        buf.write(
            f"{r.predictor},{r.dataset},{r.accuracy:.2f},{r.precision:.2f},{r.recall:.2f},{r.f1:.2f}\n"
        )
    return buf.getvalue()


def from_csv(text: str) -> list[MetricsReport]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "predictor,dataset,accuracy,precision,recall,f1":
        raise ParseError("metrics CSV is missing its header row")
    reports = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 6:
            raise ParseError(f"metrics CSV line {lineno}: expected 6 fields, got {len(fields)}")
        reports.append(
            MetricsReport(
                predictor=fields[0],
                dataset=fields[1],
                accuracy=float(fields[2]),
                precision=float(fields[3]),
                recall=float(fields[4]),
                f1=float(fields[5]),
            )
        )
    return reports
