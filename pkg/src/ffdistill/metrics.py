"""Evaluation metrics over scored datasets: rank-based AUC, thresholded
confusion-matrix metrics, Pearson correlation, and score moments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ffdistill.errors import NumericError

DEFAULT_THRESHOLD = 0.5


def _as_scores(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d sequence")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _as_binary_labels(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("labels must be a nonempty 1-d sequence")
    if not np.isin(arr, (0.0, 1.0)).all():
        raise ValueError("labels must be binary (0 or 1)")
    return arr.astype(bool)


def _average_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks, ties sharing the average of their rank range."""
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auc(scores, labels) -> float:
    """Mann–Whitney AUC with half credit for ties: the probability that a
    random positive outranks a random negative."""
    s = _as_scores(scores, "scores")
    y = _as_binary_labels(labels)
    if len(s) != len(y):
        raise ValueError(f"scores and labels lengths differ: {len(s)} vs {len(y)}")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise NumericError("AUC needs at least one positive and one negative label")
    ranks = _average_ranks(s)
    pos_rank_sum = float(ranks[y].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def threshold_metrics(scores, labels, threshold: float = DEFAULT_THRESHOLD):
    """(accuracy, precision, recall, f1) predicting positive iff
    score >= threshold. Precision and recall fall back to 0 when their
    denominator is 0; f1 is 0 when precision + recall is 0."""
    s = _as_scores(scores, "scores")
    y = _as_binary_labels(labels)
    if len(s) != len(y):
        raise ValueError(f"scores and labels lengths differ: {len(s)} vs {len(y)}")
    predicted = s >= threshold
    tp = int(np.sum(predicted & y))
    fp = int(np.sum(predicted & ~y))
    fn = int(np.sum(~predicted & y))
    tn = int(np.sum(~predicted & ~y))
    accuracy = (tp + tn) / len(y)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return accuracy, precision, recall, f1


def pcc(a, b) -> float:
    """Sample Pearson correlation coefficient."""
    x = _as_scores(a, "a")
    y = _as_scores(b, "b")
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("pcc needs at least two points")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc * xc).sum() * (yc * yc).sum())
    if denom == 0.0:
        raise NumericError("pcc is undefined when either input has zero variance")
    return float((xc * yc).sum() / denom)


def moments(scores) -> tuple[float, float]:
    """(mean, variance) with the population (÷n) variance, matching moment
    statistics over a fixed sample."""
    s = _as_scores(scores, "scores")
    return float(s.mean()), float(s.var())


@dataclass(frozen=True)
class MetricsReport:
    """Flat metric bundle; mean/variance describe the score distribution."""

    auc: float
    accuracy: float
    precision: float
    recall: float
    f1: float
    mean: float
    variance: float
    pcc: Optional[float] = None

    def as_text(self) -> str:
        lines = []
        for name in ("auc", "accuracy", "precision", "recall", "f1", "pcc", "mean", "variance"):
            value = getattr(self, name)
            if value is None:
                continue
            lines.append(f"{name}\t{value!r}\n")
        return "".join(lines)


def compute_report(scores, labels, threshold: float = DEFAULT_THRESHOLD) -> MetricsReport:
    """Score a model's outputs against labels that may be soft.

    Labels are binarized at 0.5 for AUC and the thresholded metrics (exact
    for already-binary labels). PCC against the raw labels is included
    whenever both sides have variance, quantifying score fidelity.
    """
    s = _as_scores(scores, "scores")
    raw = _as_scores(labels, "labels")
    hard = (raw >= 0.5).astype(np.float64)
    fidelity: Optional[float] = None
    if len(s) >= 2 and s.var() > 0.0 and raw.var() > 0.0:
        fidelity = pcc(s, raw)
    mean, variance = moments(s)
    accuracy, precision, recall, f1 = threshold_metrics(s, hard, threshold)
    return MetricsReport(
        auc=auc(s, hard),
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        mean=mean,
        variance=variance,
        pcc=fidelity,
    )


def write_report(report: MetricsReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.as_text())
