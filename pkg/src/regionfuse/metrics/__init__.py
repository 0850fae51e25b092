"""Pixel-level, component-level and semantic segmentation metrics."""
from .components import (
    DEFAULT_TAU_GRID,
    f1_counts,
    f1_from_counts,
    mean_f1,
    ood_components,
    siou_gt,
    siou_per_component,
)
from .pixel import aupr, auroc, fpr_at_tpr, operating_point
from .report import MetricReport, evaluate_ood, evaluate_seg
from .semantic import SegMetrics, confusion_matrix, majority_vote_labels, metrics_from_confusion, seg_metrics

__all__ = [
    "DEFAULT_TAU_GRID",
    "MetricReport",
    "SegMetrics",
    "aupr",
    "auroc",
    "confusion_matrix",
    "evaluate_ood",
    "evaluate_seg",
    "f1_counts",
    "f1_from_counts",
    "fpr_at_tpr",
    "majority_vote_labels",
    "mean_f1",
    "metrics_from_confusion",
    "ood_components",
    "operating_point",
    "seg_metrics",
    "siou_gt",
    "siou_per_component",
]
