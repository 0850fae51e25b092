"""Turn region scores and validity into region proposals.

Soft assignment gives each pixel to ``argmax_n r[n, h, w] * v[n]``; hard
assignment thresholds every region map and paints the masks in ascending
validity order. Class fusion is the region-to-class matrix product used by
mask-classification models.
"""
import numpy as np

from . import kernels
from .core import AssignmentMap, ProposalSet, validate_bundle
from .errors import ShapeError

DEFAULT_THRESHOLD = 0.5


def _check_vector(V):
    if np.ndim(V) != 1:
        raise ShapeError(f"validity must be a vector of length N, got shape {np.shape(V)}")


def soft_assign(R, V):
    """Assign every pixel to the region maximising ``r * v``.

    Ties go to the lowest region index. No pixel is left unassigned.
    """
    _check_vector(V)
    validate_bundle(R, V)
    index, score = kernels.soft_assign(R, V)
    return AssignmentMap(index, score)


def hard_assign(R, V, threshold=DEFAULT_THRESHOLD):
    """Threshold-and-stack baseline.

    Each region's mask is ``R[n] >= threshold``. Masks are painted in ascending
    validity (ties in ascending index), so later, more valid masks win.
    Pixels claimed by no mask get :data:`~regionfuse.core.UNASSIGNED`.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    _check_vector(V)
    validate_bundle(R, V)
    index, score = kernels.hard_assign(R, V, threshold)
    return AssignmentMap(index, score)


def class_fusion(R, V):
    """``Y[h, w, c] = sum_n R[n, h, w] * V[n, c]``, unnormalised, in float64."""
    if np.ndim(V) != 2:
        raise ShapeError(f"class validity must be (N, C), got shape {np.shape(V)}")
    validate_bundle(R, V)
    return kernels.class_fusion(R, V)


def proposals(assignment, n_regions):
    """Region masks of an assignment; raises if an index is out of range."""
    return ProposalSet.from_assignment(assignment, n_regions)
