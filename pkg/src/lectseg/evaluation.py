"""Confusion matrices and per-class precision/recall/F reports.

Rows are true labels, columns predictions. Zero-denominator ratios are
reported as 0 and flagged undefined rather than dropped: the sparse classes
(Other, Digression) routinely have empty columns on small evals.
"""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch
from .taxonomy import LABELS, N_CLASSES


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # (K, K) int64, rows true / cols predicted

    @property
    def n_classes(self):
        return self.counts.shape[0]

    @property
    def total(self):
        return int(self.counts.sum())


@dataclass
class MetricsReport:
    labels: list
    precision: np.ndarray
    recall: np.ndarray
    f_score: np.ndarray
    support: np.ndarray
    undefined_precision: np.ndarray
    undefined_recall: np.ndarray
    undefined_f: np.ndarray
    macro_precision: float
    macro_recall: float
    macro_f: float
    accuracy: float
    extras: dict = field(default_factory=dict)


def confusion(preds, golds, n_classes=N_CLASSES):
    """Count (gold, pred) pairs into a K x K matrix."""
    if len(preds) != len(golds):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(golds)} golds")
    if len(preds) == 0:
        raise LengthMismatch("need at least one prediction/gold pair")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    for g, p in zip(golds, preds):
        if not (0 <= g < n_classes and 0 <= p < n_classes):
            raise ValueError(f"label id out of range: gold={g} pred={p}")
        counts[g, p] += 1
    return ConfusionMatrix(counts)


def per_class_metrics(cm, label_names=None):
    """precision_c = TP/(TP+FP), recall_c = TP/(TP+FN), F = 2PR/(P+R).

    Macro averages run over classes with non-zero support so absent classes
    do not drag the summary to zero.
    """
    counts = cm.counts
    k = cm.n_classes
    if label_names is None:
        label_names = [l.name for l in LABELS[:k]] if k <= N_CLASSES else [str(i) for i in range(k)]
    tp = np.diag(counts).astype(np.float64)
    col = counts.sum(axis=0).astype(np.float64)
    row = counts.sum(axis=1).astype(np.float64)

    undef_p = col == 0
    undef_r = row == 0
    precision = np.divide(tp, col, out=np.zeros(k), where=~undef_p)
    recall = np.divide(tp, row, out=np.zeros(k), where=~undef_r)
    pr = precision + recall
    undef_f = pr == 0
    f_score = np.divide(2 * precision * recall, pr, out=np.zeros(k), where=~undef_f)

    supported = row > 0
    n_sup = max(1, int(supported.sum()))
    total = counts.sum()
    return MetricsReport(
        labels=list(label_names),
        precision=precision,
        recall=recall,
        f_score=f_score,
        support=row.astype(np.int64),
        undefined_precision=undef_p,
        undefined_recall=undef_r,
        undefined_f=undef_f,
        macro_precision=float(precision[supported].sum() / n_sup),
        macro_recall=float(recall[supported].sum() / n_sup),
        macro_f=float(f_score[supported].sum() / n_sup),
        accuracy=float(tp.sum() / total) if total else 0.0,
    )


def row_normalize(cm):
    """Each non-zero row scaled to sum to 1; zero rows stay zero."""
    counts = cm.counts.astype(np.float64)
    sums = counts.sum(axis=1, keepdims=True)
    return np.divide(counts, sums, out=np.zeros_like(counts), where=sums > 0)


def render_metrics_table(report):
    """Aligned text table: Label / Precision / Recall / F-Score, one row per class."""
    width = max(len("Label"), *(len(name) for name in report.labels))
    header = f"{'Label':<{width}}  Precision  Recall  F-Score"
    lines = [header, "-" * len(header)]
    for i, name in enumerate(report.labels):
        lines.append(
            f"{name:<{width}}  {report.precision[i]:>9.3f}  {report.recall[i]:>6.3f}  {report.f_score[i]:>7.3f}"
        )
    return "\n".join(lines) + "\n"


def metrics_to_json(report):
    doc = {
        "per_class": [
            {
                "label": name,
                "precision": float(report.precision[i]),
                "recall": float(report.recall[i]),
                "f_score": float(report.f_score[i]),
                "support": int(report.support[i]),
                "undefined": {
                    "precision": bool(report.undefined_precision[i]),
                    "recall": bool(report.undefined_recall[i]),
                    "f_score": bool(report.undefined_f[i]),
                },
            }
            for i, name in enumerate(report.labels)
        ],
        "macro": {
            "precision": report.macro_precision,
            "recall": report.macro_recall,
            "f_score": report.macro_f,
        },
        "accuracy": report.accuracy,
    }
    return json.dumps(doc, indent=2)


def confusion_to_csv(cm, normalized=False, label_names=None):
    k = cm.n_classes
    if label_names is None:
        label_names = [l.name for l in LABELS[:k]] if k <= N_CLASSES else [str(i) for i in range(k)]
    matrix = row_normalize(cm) if normalized else cm.counts
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["true\\pred", *label_names])
    for i, name in enumerate(label_names):
        row = [repr(float(v)) if normalized else int(v) for v in matrix[i]]
        writer.writerow([name, *row])
    return buf.getvalue()
