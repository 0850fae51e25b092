"""Confusion-matrix segmentation metrics and majority-vote region labelling."""
from typing import NamedTuple

import numpy as np

from ..core import IGNORE_LABEL, UNASSIGNED
from ..errors import ShapeError, UndefinedMetricError


class SegMetrics(NamedTuple):
    miou: float
    fwiou: float
    macc: float
    pacc: float


def confusion_matrix(pred, gt, n_classes, ignore_label=IGNORE_LABEL):
    """``(C, C + 1)`` counts; row = gt class, last column = predictions outside ``[0, C)``.

    Ground-truth ignore pixels are dropped. Unassigned or ignore predictions land
    in the last column and so count against every class.
    """
    pred = np.asarray(pred).astype(np.int64)
    gt = np.asarray(gt).astype(np.int64)
    if pred.shape != gt.shape:
        raise ShapeError(f"pred and gt differ in shape: {pred.shape} vs {gt.shape}")
    valid = gt != ignore_label
    g = gt[valid]
    if g.size and (g.min() < 0 or g.max() >= n_classes):
        raise ValueError(f"gt labels must lie in [0, {n_classes}) or equal {ignore_label}")
    p = pred[valid]
    p = np.where((p >= 0) & (p < n_classes), p, n_classes)
    return np.bincount(g * (n_classes + 1) + p, minlength=n_classes * (n_classes + 1)).reshape(
        n_classes, n_classes + 1
    )


def metrics_from_confusion(cm):
    cm = np.asarray(cm, dtype=np.float64)
    n = cm.shape[0]
    tp = np.diag(cm[:, :n])
    gt_count = cm.sum(axis=1)
    pred_count = cm[:, :n].sum(axis=0)
    present = gt_count > 0
    if not present.any():
        raise UndefinedMetricError("no labelled pixels to evaluate")
    iou = tp[present] / (gt_count[present] + pred_count[present] - tp[present])
    weights = gt_count[present] / gt_count.sum()
    return SegMetrics(
        miou=float(iou.mean()),
        fwiou=float(np.sum(weights * iou)),
        macc=float(np.mean(tp[present] / gt_count[present])),
        pacc=float(tp.sum() / gt_count.sum()),
    )


def seg_metrics(pred, gt, n_classes, ignore_label=IGNORE_LABEL):
    """mIoU, fwIoU, mACC and pACC over the classes present in ``gt``."""
    return metrics_from_confusion(confusion_matrix(pred, gt, n_classes, ignore_label))


def majority_vote_labels(proposals, gt, ignore_label=IGNORE_LABEL):
    """Label every proposal with its most frequent ground-truth class.

    Ignore pixels do not vote; ties go to the lowest class id. Regions with no
    voting pixel, and pixels outside every proposal, get ``ignore_label``.
    """
    gt = np.asarray(gt)
    index = proposals.index
    if gt.shape != index.shape:
        raise ShapeError(f"proposals and gt differ in shape: {index.shape} vs {gt.shape}")
    assigned = index != UNASSIGNED
    voting = assigned & (gt != ignore_label)
    n = proposals.n_regions
    n_labels = int(gt[voting].max()) + 1 if voting.any() else 1
    votes = np.bincount(
        index[voting].astype(np.int64) * n_labels + gt[voting].astype(np.int64),
        minlength=n * n_labels,
    ).reshape(n, n_labels)
    winner = votes.argmax(axis=1).astype(np.int64)
    winner[votes.sum(axis=1) == 0] = ignore_label
    out = np.full(gt.shape, ignore_label, dtype=gt.dtype)
    out[assigned] = winner[index[assigned]]
    return out
