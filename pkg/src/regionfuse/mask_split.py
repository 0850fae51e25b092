"""Mask split: break each class of an annotation into its connected components."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .core import IGNORE_LABEL


@dataclass(frozen=True)
class Component:
    component_id: int
    class_id: int
    mask: np.ndarray
    pixel_count: int


@dataclass(frozen=True)
class ComponentSet:
    """Connected components of a label map.

    ``label_image`` holds ``component_id + 1`` per pixel and 0 where no
    component lies; ``class_ids[k]`` and ``pixel_counts[k]`` describe component
    ``k``. Components are numbered by their first pixel in raster order.
    """

    label_image: np.ndarray
    class_ids: np.ndarray
    pixel_counts: np.ndarray
    connectivity: int = 8

    def __len__(self):
        return len(self.class_ids)

    def __iter__(self):
        return iter(self.components)

    @property
    def shape(self):
        return self.label_image.shape

    @cached_property
    def components(self):
        return [
            Component(k, int(self.class_ids[k]), self.label_image == k + 1, int(self.pixel_counts[k]))
            for k in range(len(self))
        ]

    def of_class(self, class_id):
        return [c for c in self.components if c.class_id == class_id]

    @classmethod
    def empty(cls, shape, connectivity=8):
        return cls(np.zeros(shape, np.int32), np.zeros(0, np.int64), np.zeros(0, np.int64), connectivity)


def _component_set(values, valid, connectivity):
    lab, count = kernels.label_equal(values, valid, connectivity)
    flat = lab.ravel()
    on = flat > 0
    counts = np.bincount(flat[on] - 1, minlength=count).astype(np.int64)
    class_ids = np.zeros(count, np.int64)
    class_ids[flat[on] - 1] = np.asarray(values).ravel()[on]
    return ComponentSet(lab, class_ids, counts, connectivity)


def connected_components(mask, connectivity=8):
    """Split a binary mask into its maximal connected subsets.

    Returns a list of bool masks ordered by their first pixel in raster order;
    an empty mask gives an empty list.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {mask.shape}")
    lab, count = kernels.label_equal(np.zeros(mask.shape, np.int64), mask, connectivity)
    return [lab == k for k in range(1, count + 1)]


def mask_components(mask, connectivity=8, class_id=1):
    """Connected components of a binary mask as a :class:`ComponentSet`."""
    mask = np.asarray(mask, dtype=bool)
    values = np.where(mask, class_id, 0)
    return _component_set(values, mask, connectivity)


def split_labels(labels, connectivity=8, ignore_label=IGNORE_LABEL):
    """Decompose every class of ``labels`` into connected components.

    Pixels equal to ``ignore_label`` belong to no component. Two pixels join
    the same component only when they are adjacent and carry the same class.
    """
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ValueError(f"label map must be 2-D, got shape {labels.shape}")
    return _component_set(labels, labels != ignore_label, connectivity)
