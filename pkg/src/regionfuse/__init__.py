"""Class-agnostic region post-processing and OOD segmentation evaluation.

Soft/hard region assignment, mask split, structure-constrained fusion of
per-pixel scores, and pixel/component/semantic metrics, over plain numpy arrays.
"""
from ._backend import BACKEND, set_threads
from .assignment import class_fusion, hard_assign, proposals, soft_assign
from .core import (
    IGNORE_LABEL,
    UNASSIGNED,
    AssignmentMap,
    ProposalSet,
    load_array,
    save_array,
    validate_bundle,
)
from .fusion import HybridScore, RegionMeans, ood_score_map, region_mean, scf_fuse
from .mask_split import Component, ComponentSet, connected_components, mask_components, split_labels

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "IGNORE_LABEL",
    "UNASSIGNED",
    "AssignmentMap",
    "Component",
    "ComponentSet",
    "HybridScore",
    "ProposalSet",
    "RegionMeans",
    "class_fusion",
    "connected_components",
    "hard_assign",
    "load_array",
    "mask_components",
    "ood_score_map",
    "proposals",
    "region_mean",
    "save_array",
    "scf_fuse",
    "set_threads",
    "soft_assign",
    "split_labels",
    "validate_bundle",
]
