"""Pixel-level rank metrics for anomaly scores: AUROC, AUPR (average precision), FPR at TPR.

Labels are 1 for OOD (positive), 0 for in-distribution; any other value, the
ignore label in particular, is dropped. Higher scores mean "more anomalous".
"""
from dataclasses import dataclass

import numpy as np

from ..errors import UndefinedMetricError


@dataclass(frozen=True)
class _Curve:
    thresholds: np.ndarray  # distinct scores, descending
    tp: np.ndarray  # positives with score >= threshold
    fp: np.ndarray
    n_pos: int
    n_neg: int


def _curve(scores, labels):
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise ValueError(f"scores and labels differ in size: {scores.size} vs {labels.size}")
    keep = (labels == 0) | (labels == 1)
    scores, pos = scores[keep], labels[keep] == 1
    if not np.isfinite(scores).all():
        raise ValueError("scores must be finite")
    n_pos = int(pos.sum())
    n_neg = int(pos.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError(f"need both classes, got {n_pos} positives and {n_neg} negatives")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    # last index of every block of tied scores
    ends = np.flatnonzero(np.diff(s) != 0)
    ends = np.append(ends, s.size - 1)
    tp = np.cumsum(pos[order])[ends]
    fp = ends + 1 - tp
    return _Curve(s[ends], tp, fp, n_pos, n_neg)


def auroc(scores, labels):
    """Mann-Whitney statistic ``P(s_pos > s_neg) + 0.5 * P(s_pos == s_neg)``."""
    c = _curve(scores, labels)
    dp = np.diff(c.tp, prepend=0)
    dn = np.diff(c.fp, prepend=0)
    # each negative beats the positives seen before its tie block, and half of its block
    wins = np.sum(dn * (c.tp - dp + 0.5 * dp))
    return float(wins / (c.n_pos * c.n_neg))


def aupr(scores, labels):
    """Average precision with step interpolation; tied scores form one operating point."""
    c = _curve(scores, labels)
    precision = c.tp / (c.tp + c.fp)
    recall_step = np.diff(c.tp, prepend=0) / c.n_pos
    return float(np.sum(precision * recall_step))


def operating_point(scores, labels, tpr_target=0.95):
    """``(fpr, threshold)`` at the largest threshold whose TPR reaches ``tpr_target``."""
    if not 0.0 < tpr_target <= 1.0:
        raise ValueError(f"tpr_target must lie in (0, 1], got {tpr_target}")
    c = _curve(scores, labels)
    k = int(np.argmax(c.tp / c.n_pos >= tpr_target))
    return float(c.fp[k] / c.n_neg), float(c.thresholds[k])


def fpr_at_tpr(scores, labels, tpr_target=0.95):
    return operating_point(scores, labels, tpr_target)[0]
