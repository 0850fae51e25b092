"""Component-level anomaly metrics: adjusted IoU per ground-truth component and mean F1.

For a ground-truth component ``K`` let ``P`` be the union of predicted
components touching ``K`` and ``A`` the pixels of ``P`` lying on other
ground-truth components. Then ``sIoU(K) = |K & P| / (|K | P| - |A|)``.
A predicted component's positive predictive value is the fraction of its
pixels on any ground-truth component.
"""
import numpy as np

from ..errors import UndefinedMetricError
from ..mask_split import mask_components

DEFAULT_TAU_GRID = tuple(np.round(np.linspace(0.25, 0.75, 11), 10).tolist())


def _overlap(pred, gt):
    # overlap[k, p] = pixels shared by gt component k and predicted component p
    if pred.shape != gt.shape:
        raise ValueError(f"component maps differ in shape: {pred.shape} vs {gt.shape}")
    kg, kp = len(gt), len(pred)
    g = gt.label_image.ravel().astype(np.int64)
    p = pred.label_image.ravel().astype(np.int64)
    both = (g > 0) & (p > 0)
    flat = (g[both] - 1) * kp + (p[both] - 1)
    return np.bincount(flat, minlength=kg * kp).reshape(kg, kp)


def _siou(overlap, pred_sizes, gt_sizes):
    on_gt = overlap.sum(axis=0)  # pixels of each prediction on any gt component
    out = np.zeros(overlap.shape[0])
    for k in range(overlap.shape[0]):
        touch = overlap[k] > 0
        inter = overlap[k, touch].sum()
        union = gt_sizes[k] + pred_sizes[touch].sum() - inter
        adjust = (on_gt[touch] - overlap[k, touch]).sum()
        out[k] = inter / (union - adjust)
    return out


def siou_per_component(pred_components, gt_components):
    """sIoU of every ground-truth component against a predicted :class:`ComponentSet`."""
    ov = _overlap(pred_components, gt_components)
    return _siou(ov, pred_components.pixel_counts, gt_components.pixel_counts)


def siou_gt(pred_mask, gt_components, connectivity=8, ignore=None):
    """Per-component sIoU and their mean for a binary prediction.

    Predicted pixels under ``ignore`` are dropped before the prediction is
    split into components.
    """
    if len(gt_components) == 0:
        raise UndefinedMetricError("sIoU is undefined without ground-truth components")
    pred_mask = np.asarray(pred_mask, dtype=bool)
    if ignore is not None:
        pred_mask = pred_mask & ~np.asarray(ignore, dtype=bool)
    pred = mask_components(pred_mask, connectivity)
    per = siou_per_component(pred, gt_components)
    return per, float(per.mean())


def f1_counts(pred_components, gt_components, tau_grid=DEFAULT_TAU_GRID):
    """Per-threshold ``(tp, fn, fp)`` integer arrays; sum these across images before :func:`f1_from_counts`."""
    tau = np.asarray(tau_grid, dtype=np.float64)
    if tau.ndim != 1 or tau.size == 0:
        raise ValueError("tau_grid must be a non-empty list of thresholds")
    ov = _overlap(pred_components, gt_components)
    siou = _siou(ov, pred_components.pixel_counts, gt_components.pixel_counts)
    sizes = pred_components.pixel_counts
    ppv = ov.sum(axis=0) / np.maximum(sizes, 1)
    tp = (siou[None, :] > tau[:, None]).sum(axis=1)
    fn = len(gt_components) - tp
    fp = (ppv[None, :] <= tau[:, None]).sum(axis=1)
    return tp.astype(np.int64), fn.astype(np.int64), fp.astype(np.int64)


def f1_from_counts(tp, fn, fp):
    tp, fn, fp = (np.asarray(x, dtype=np.float64) for x in (tp, fn, fp))
    denom = 2 * tp + fn + fp
    if (denom == 0).any():
        raise UndefinedMetricError("component F1 is undefined without any components")
    return float(np.mean(2 * tp / denom))


def mean_f1(pred_components, gt_components, tau_grid=DEFAULT_TAU_GRID):
    """Component-wise F1 averaged over detection thresholds ``tau_grid``.

    At each ``tau`` a ground-truth component is a true positive when its sIoU
    exceeds ``tau``; a predicted component is a false positive when its
    positive predictive value is at most ``tau``.
    """
    if len(pred_components) == 0 and len(gt_components) == 0:
        raise UndefinedMetricError("component F1 is undefined without any components")
    return f1_from_counts(*f1_counts(pred_components, gt_components, tau_grid))


def ood_components(gt, connectivity=8):
    """Ground-truth OOD components of a binary label map (1 = OOD)."""
    return mask_components(np.asarray(gt) == 1, connectivity)
