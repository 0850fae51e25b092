"""Evaluation drivers producing a :class:`MetricReport`."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import IGNORE_LABEL
from ..errors import ShapeError, UndefinedMetricError
from ..mask_split import mask_components
from .components import DEFAULT_TAU_GRID, f1_counts, f1_from_counts, siou_per_component
from .pixel import aupr, auroc, operating_point
from .semantic import confusion_matrix, metrics_from_confusion

SCHEMA = 1

DEFINITIONS = {
    "aupr": "average precision, step interpolation, tied scores form one operating point",
    "fpr95": "FPR at the largest threshold t with TPR(score >= t) >= tpr_target",
    "auroc": "P(s_pos > s_neg) + 0.5 P(s_pos == s_neg)",
    "siou_gt": "mean over gt components K of |K&P| / (|K|P| - |A|); P = predicted components "
    "touching K, A = pixels of P on other gt components; predictions on ignore pixels dropped",
    "mean_f1": "mean over tau of 2TP/(2TP+FN+FP); TP: gt components with sIoU > tau; "
    "FP: predicted components with PPV <= tau",
    "seg": "confusion matrix over gt-present classes; gt ignore excluded; "
    "unassigned predictions count as wrong",
}

_METRIC_KEYS = ("aupr", "fpr95", "auroc", "siou_gt", "mean_f1", "miou", "fwiou", "macc", "pacc")


@dataclass
class MetricReport:
    aupr: Optional[float] = None
    fpr95: Optional[float] = None
    auroc: Optional[float] = None
    siou_gt: Optional[float] = None
    mean_f1: Optional[float] = None
    miou: Optional[float] = None
    fwiou: Optional[float] = None
    macc: Optional[float] = None
    pacc: Optional[float] = None
    pred_threshold: Optional[float] = None
    counts: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def metrics(self):
        return {k: getattr(self, k) for k in _METRIC_KEYS if getattr(self, k) is not None}

    def to_dict(self):
        out = {"schema": SCHEMA, "metrics": self.metrics()}
        if self.pred_threshold is not None:
            out["pred_threshold"] = self.pred_threshold
        out["counts"] = dict(self.counts)
        out["params"] = dict(self.params)
        out["definitions"] = {
            k: v for k, v in DEFINITIONS.items()
            if k in out["metrics"] or (k == "seg" and self.miou is not None)
        }
        return out


def _batch(a, name):
    a = np.asarray(a)
    if a.ndim == 2:
        return a[None]
    if a.ndim == 3:
        return a
    raise ShapeError(f"{name} must be (H, W) or (B, H, W), got {a.shape}")


def evaluate_ood(
    scores,
    gt,
    pred_threshold="auto",
    tpr_target=0.95,
    tau_grid=DEFAULT_TAU_GRID,
    connectivity=8,
    ignore_label=IGNORE_LABEL,
):
    """Pixel- and component-level OOD metrics for one image or a batch.

    ``gt`` holds 0 (in-distribution), 1 (OOD) or ``ignore_label``. Prediction
    components come from ``scores >= pred_threshold``; ``"auto"`` uses the
    operating threshold of the FPR metric. Component counts are summed over
    images before F1 is computed.
    """
    s = _batch(scores, "scores").astype(np.float64)
    g = _batch(gt, "gt")
    if s.shape != g.shape:
        raise ShapeError(f"scores and gt differ in shape: {s.shape} vs {g.shape}")
    bad = ~np.isin(g, (0, 1, ignore_label))
    if bad.any():
        pos = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ValueError(f"gt{list(pos)} = {g[pos]} is not 0, 1 or {ignore_label}")

    valid = g != ignore_label
    fpr95, op_threshold = operating_point(s[valid], g[valid], tpr_target)
    report = MetricReport(
        aupr=aupr(s[valid], g[valid]),
        fpr95=fpr95,
        auroc=auroc(s[valid], g[valid]),
    )
    threshold = op_threshold if pred_threshold == "auto" else float(pred_threshold)
    report.pred_threshold = threshold

    tau = np.asarray(tau_grid, dtype=np.float64)
    tp = np.zeros(tau.size, np.int64)
    fn = np.zeros(tau.size, np.int64)
    fp = np.zeros(tau.size, np.int64)
    sious = []
    n_pred = 0
    for b in range(s.shape[0]):
        gt_comp = mask_components(g[b] == 1, connectivity)
        pred_comp = mask_components((s[b] >= threshold) & valid[b], connectivity)
        n_pred += len(pred_comp)
        if len(gt_comp):
            sious.append(siou_per_component(pred_comp, gt_comp))
        t, n, f = f1_counts(pred_comp, gt_comp, tau)
        tp += t
        fn += n
        fp += f
    n_gt = int(sum(len(x) for x in sious))
    if n_gt == 0:
        raise UndefinedMetricError("no ground-truth OOD components; sIoU is undefined")
    report.siou_gt = float(np.concatenate(sious).mean())
    report.mean_f1 = f1_from_counts(tp, fn, fp)
    report.counts = {
        "images": int(s.shape[0]),
        "pixels": int(valid.sum()),
        "ood_pixels": int((g == 1).sum()),
        "id_pixels": int((g == 0).sum()),
        "ignored_pixels": int((~valid).sum()),
        "gt_components": n_gt,
        "pred_components": int(n_pred),
    }
    report.params = {
        "tpr_target": float(tpr_target),
        "tau_grid": [float(x) for x in tau],
        "connectivity": int(connectivity),
        "pred_threshold_mode": "auto" if pred_threshold == "auto" else "fixed",
    }
    return report


def evaluate_seg(pred, gt, n_classes, ignore_label=IGNORE_LABEL):
    """Semantic segmentation metrics for one map or a batch (confusion matrices summed)."""
    p = _batch(pred, "pred")
    g = _batch(gt, "gt")
    if p.shape != g.shape:
        raise ShapeError(f"pred and gt differ in shape: {p.shape} vs {g.shape}")
    cm = confusion_matrix(p, g, n_classes, ignore_label)
    m = metrics_from_confusion(cm)
    return MetricReport(
        miou=m.miou,
        fwiou=m.fwiou,
        macc=m.macc,
        pacc=m.pacc,
        counts={
            "images": int(p.shape[0]),
            "pixels": int(cm.sum()),
            "ignored_pixels": int((g == ignore_label).sum()),
            "unassigned_pixels": int(cm[:, -1].sum()),
            "classes_present": int((cm.sum(axis=1) > 0).sum()),
        },
        params={"n_classes": int(n_classes)},
    )
