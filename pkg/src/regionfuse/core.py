"""Dense-array domain types, shape validation and the ``.npy`` v1.0 container.

Score arrays are plain numpy arrays with fixed layouts:

* region scores ``R``: ``(N, H, W)`` in [0, 1]
* validity ``V``: ``(N,)`` in [0, 1], or ``(N, C)`` class validity for class fusion
* pixel distribution ``D``: ``(H, W, C)``, finite; ``C == 1`` in OOD mode
* label maps: ``(H, W)`` unsigned integers, ``ignore_label`` (255 by default) marks void

Only types that bundle several arrays get a class of their own.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.lib.format as npformat

from .errors import ConsistencyError, FormatError, RangeError, ShapeError, ValidationError

UNASSIGNED = 65535
"""Sentinel region index; maximum of the uint16 index type."""
MAX_REGIONS = UNASSIGNED - 1
IGNORE_LABEL = 255

SUPPORTED_DTYPES = ("<f4", "|u1", "<u2")


# --------------------------------------------------------------------------- types


@dataclass(frozen=True)
class AssignmentMap:
    """Per-pixel region index plus the winning ``r * v`` product.

    ``region_index`` is uint16 with :data:`UNASSIGNED` for pixels no region
    claims (hard assignment only); ``score`` is 0 there.
    """

    region_index: np.ndarray
    score: np.ndarray

    @property
    def shape(self):
        return self.region_index.shape

    @property
    def n_unassigned(self):
        return int(np.count_nonzero(self.region_index == UNASSIGNED))


@dataclass(frozen=True)
class ProposalSet:
    """Disjoint binary region masks, stored as a partition index map.

    ``index[h, w]`` is the region owning the pixel or :data:`UNASSIGNED`.
    Masks are materialised on demand through :attr:`masks` or :meth:`mask`.
    """

    index: np.ndarray
    n_regions: int

    def __post_init__(self):
        index = np.asarray(self.index)
        if index.ndim != 2:
            raise ShapeError(f"proposal index must be 2-D, got shape {index.shape}")
        if not 1 <= self.n_regions <= MAX_REGIONS:
            raise ConsistencyError(f"n_regions must be in [1, {MAX_REGIONS}], got {self.n_regions}")
        index = index.astype(np.uint16, copy=False)
        bad = (index != UNASSIGNED) & (index >= self.n_regions)
        if bad.any():
            pos = tuple(int(x) for x in np.argwhere(bad)[0])
            raise ConsistencyError(
                f"region index {int(index[pos])} at {pos} >= n_regions {self.n_regions}"
            )
        object.__setattr__(self, "index", index)

    @classmethod
    def from_masks(cls, masks):
        """Build from an ``(N, H, W)`` stack of binary masks; overlaps are rejected."""
        masks = np.asarray(masks).astype(bool, copy=False)
        if masks.ndim != 3 or masks.shape[0] < 1:
            raise ShapeError(f"mask stack must be (N, H, W) with N >= 1, got {masks.shape}")
        cover = masks.sum(axis=0)
        if (cover > 1).any():
            pos = tuple(int(x) for x in np.argwhere(cover > 1)[0])
            raise ValidationError(f"proposals overlap at pixel {pos}")
        index = np.full(masks.shape[1:], UNASSIGNED, np.uint16)
        for n in range(masks.shape[0]):
            index[masks[n]] = n
        return cls(index, masks.shape[0])

    @classmethod
    def from_assignment(cls, assignment, n_regions):
        return cls(assignment.region_index, n_regions)

    @property
    def shape(self):
        return self.index.shape

    def mask(self, n):
        return self.index == n

    @cached_property
    def masks(self):
        """``(N, H, W)`` bool array of region masks."""
        return self.index[None, :, :] == np.arange(self.n_regions, dtype=np.uint16)[:, None, None]

    @cached_property
    def pixel_counts(self):
        hit = self.index != UNASSIGNED
        return np.bincount(self.index[hit], minlength=self.n_regions)

    @property
    def exhaustive(self):
        return not (self.index == UNASSIGNED).any()


# ---------------------------------------------------------------------- validation


def _check_unit_range(name, x):
    bad = ~((x >= 0.0) & (x <= 1.0))
    if bad.any():
        pos = tuple(int(i) for i in np.argwhere(bad)[0])
        raise RangeError(f"{name}{list(pos)} = {x[pos]!r} outside [0, 1]")


def validate_scores(R):
    R = np.asarray(R)
    if R.ndim != 3 or min(R.shape) < 1:
        raise ShapeError(f"R must be (N, H, W) with every dim >= 1, got {R.shape}")
    if R.shape[0] > MAX_REGIONS:
        raise ShapeError(f"N: {R.shape[0]} exceeds the index limit {MAX_REGIONS}")
    _check_unit_range("R", R)


def validate_distribution(D, shape=None):
    D = np.asarray(D)
    if D.ndim != 3 or min(D.shape) < 1:
        raise ShapeError(f"D must be (H, W, C) with every dim >= 1, got {D.shape}")
    if shape is not None:
        for name, a, b in (("H", D.shape[0], shape[0]), ("W", D.shape[1], shape[1])):
            if a != b:
                raise ShapeError(f"{name}: {b} vs {a}")
    bad = ~np.isfinite(D)
    if bad.any():
        pos = tuple(int(i) for i in np.argwhere(bad)[0])
        raise RangeError(f"D{list(pos)} = {D[pos]!r} is not finite")


def validate_bundle(R, V, D=None):
    """Check that ``R``, ``V`` and optionally ``D`` agree in N/H/W and respect their ranges.

    Raises :class:`ShapeError` naming both sides of a mismatch ("N: 4 vs 3") or
    :class:`RangeError` with the first offending index in row-major order.
    """
    R = np.asarray(R)
    V = np.asarray(V)
    if R.ndim != 3 or min(R.shape) < 1:
        raise ShapeError(f"R must be (N, H, W) with every dim >= 1, got {R.shape}")
    if V.ndim not in (1, 2):
        raise ShapeError(f"V must be (N,) or (N, C), got {V.shape}")
    if V.shape[0] != R.shape[0]:
        raise ShapeError(f"N: {R.shape[0]} vs {V.shape[0]}")
    validate_scores(R)
    _check_unit_range("V", V)
    if D is not None:
        validate_distribution(D, R.shape[1:])


# ------------------------------------------------------------------ array container


def _as_supported(data):
    arr = np.asarray(data)
    if arr.dtype == np.bool_:
        arr = arr.astype(np.uint8)
    arr = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
    if arr.dtype.str not in SUPPORTED_DTYPES:
        raise FormatError(f"unsupported element type {arr.dtype.str}; expected one of {SUPPORTED_DTYPES}")
    return np.ascontiguousarray(arr)


def save_array(data, path):
    """Write ``data`` as a little-endian, row-major ``.npy`` v1.0 file.

    Bool arrays are stored as ``|u1``. Output bytes depend only on the array.
    """
    arr = _as_supported(data)
    if arr.size == 0:
        raise ShapeError(f"refusing to save an empty array of shape {arr.shape}")
    header = {"descr": arr.dtype.str, "fortran_order": False, "shape": arr.shape}
    with open(path, "wb") as fh:
        npformat.write_array_header_1_0(fh, header)
        fh.write(arr.tobytes(order="C"))


def load_array(path, expected_rank=None):
    """Read a file written by :func:`save_array` (or any conforming v1.0 ``.npy``)."""
    with open(path, "rb") as fh:
        try:
            version = npformat.read_magic(fh)
        except ValueError as exc:
            raise FormatError(f"{path}: {exc}") from None
        if version != (1, 0):
            raise FormatError(f"{path}: container version {version} not supported, need (1, 0)")
        try:
            shape, fortran, dtype = npformat.read_array_header_1_0(fh)
        except ValueError as exc:
            raise FormatError(f"{path}: bad header: {exc}") from None
        if fortran:
            raise FormatError(f"{path}: column-major data is not supported")
        if dtype.str not in SUPPORTED_DTYPES:
            raise FormatError(f"{path}: unsupported element type {dtype.str}")
        count = int(np.prod(shape, dtype=np.int64))
        nbytes = count * dtype.itemsize
        payload = fh.read(nbytes)
        if len(payload) != nbytes:
            raise FormatError(f"{path}: truncated data, expected {nbytes} bytes, got {len(payload)}")
        if fh.read(1):
            raise FormatError(f"{path}: trailing bytes after array data")
    arr = np.frombuffer(payload, dtype=dtype).reshape(shape).copy()
    if expected_rank is not None and arr.ndim != expected_rank:
        raise ShapeError(f"{path}: expected rank {expected_rank}, got shape {arr.shape}")
    return arr
