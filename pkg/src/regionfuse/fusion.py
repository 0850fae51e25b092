"""Structure-constrained fusion of pixel scores with region proposals.

The hybrid score at a pixel is the mean of its region's pixel scores times
its own score. Pixels outside every proposal pass through unchanged.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import ProposalSet, validate_distribution
from .errors import ModeError, ShapeError


@dataclass(frozen=True)
class RegionMeans:
    means: np.ndarray
    """(N, C) mean score per region and class; 0 for empty regions."""
    counts: np.ndarray
    """(N,) pixel count per region."""

    @property
    def empty(self):
        return self.counts == 0


@dataclass(frozen=True)
class HybridScore:
    data: np.ndarray
    """(H, W, C) float64 hybrid scores."""
    per_region_mean: np.ndarray
    region_pixels: np.ndarray

    @property
    def empty_regions(self):
        return np.flatnonzero(self.region_pixels == 0)

    def region_table(self):
        """Non-empty regions as ``(region, pixel_count, means)`` rows."""
        return [
            (int(n), int(self.region_pixels[n]), self.per_region_mean[n].tolist())
            for n in np.flatnonzero(self.region_pixels)
        ]


def _as_proposals(proposals):
    if isinstance(proposals, ProposalSet):
        return proposals
    return ProposalSet.from_masks(proposals)


def region_mean(D, proposals):
    """Mean of ``D`` inside each proposal.

    ``proposals`` is a :class:`ProposalSet` or an ``(N, H, W)`` mask stack;
    overlapping masks raise :class:`~regionfuse.errors.ValidationError`.
    """
    proposals = _as_proposals(proposals)
    validate_distribution(D, proposals.shape)
    sums, counts = kernels.region_sums(proposals.index, D, proposals.n_regions)
    means = np.zeros_like(sums)
    filled = counts > 0
    means[filled] = sums[filled] / counts[filled, None]
    return RegionMeans(means, counts)


def scf_fuse(D, proposals):
    proposals = _as_proposals(proposals)
    rm = region_mean(D, proposals)
    data = kernels.scf_apply(D, proposals.index, rm.means)
    return HybridScore(data, rm.means, rm.counts)


def ood_score_map(hybrid):
    """Anomaly score map ``(H, W)`` from a single-channel hybrid score."""
    data = hybrid.data if isinstance(hybrid, HybridScore) else np.asarray(hybrid)
    if data.ndim != 3:
        raise ShapeError(f"hybrid score must be (H, W, C), got {data.shape}")
    if data.shape[2] != 1:
        raise ModeError(f"OOD score map needs C == 1, got C == {data.shape[2]}")
    return data[:, :, 0]
