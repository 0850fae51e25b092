"""Seeded synthetic scenes and naive-loop reference pipeline.

Randomness comes from numpy's Philox-4x64 counter-based generator, one
independent key per purpose (``key = seed + stream * 2**64``). Only
``random_raw`` is used, so streams are fixed by the Philox algorithm rather
than by numpy's distribution code. Pixel ``i`` of the noise field always
consumes raw draws ``2i`` and ``2i + 1`` (Box-Muller).
"""
import json
import os
from dataclasses import asdict, dataclass

import numpy as np

from . import _jsonfmt
from .core import UNASSIGNED, load_array, save_array
from .errors import SpecError

_STREAM_SEEDS, _STREAM_CLASSES, _STREAM_OOD, _STREAM_VALIDITY, _STREAM_NOISE = range(5)

R_HIGH = 0.95
R_LOW = 0.05
BOUNDARY_BAND = 2.0  # pixels over which a neighbour's region score decays to R_LOW
D_OOD = 0.9
D_ID = 0.1
VALIDITY_RANGE = (0.6, 1.0)

SCENE_FILES = ("gt_labels", "ood_gt", "true_R", "true_V", "clean_D", "noisy_D")


@dataclass(frozen=True)
class SceneSpec:
    seed: int = 0
    height: int = 64
    width: int = 64
    n_regions: int = 12
    n_classes: int = 5
    ood_fraction: float = 0.2
    noise_sigma: float = 0.15

    def validate(self):
        if not 0 <= self.seed < 2**64:
            raise SpecError(f"seed must be in [0, 2**64), got {self.seed}")
        if self.height < 1 or self.width < 1:
            raise SpecError(f"image size must be positive, got {self.height}x{self.width}")
        if not 1 <= self.n_regions <= self.height * self.width:
            raise SpecError(
                f"n_regions must be in [1, H*W = {self.height * self.width}], got {self.n_regions}"
            )
        if not 1 <= self.n_classes <= 254:
            raise SpecError(f"n_classes must be in [1, 254], got {self.n_classes}")
        if not 0.0 <= self.ood_fraction < 1.0:
            raise SpecError(f"ood_fraction must be in [0, 1), got {self.ood_fraction}")
        if not self.noise_sigma >= 0.0:
            raise SpecError(f"noise_sigma must be >= 0, got {self.noise_sigma}")


@dataclass(frozen=True)
class Scene:
    spec: SceneSpec
    gt_labels: np.ndarray  # (H, W) uint8; OOD regions carry label n_classes
    ood_gt: np.ndarray  # (H, W) uint8 in {0, 1}
    true_R: np.ndarray  # (N, H, W) float32
    true_V: np.ndarray  # (N,) float32
    clean_D: np.ndarray  # (H, W, 1) float32
    noisy_D: np.ndarray  # (H, W, 1) float32
    region_map: np.ndarray  # (H, W) uint16, nearest seed


def _raw(seed, stream, n):
    return np.random.Philox(key=seed + (stream << 64)).random_raw(n)


def _uniform(raw):
    # [0, 1) with 53 random bits
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)


def _normal(seed, stream, n):
    u = _uniform(_raw(seed, stream, 2 * n)).reshape(n, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    return radius * np.cos(2.0 * np.pi * u[:, 1])


def generate(spec):
    """Voronoi scene: regions around seeded sites, some flagged OOD, with clean and noisy scores."""
    spec.validate()
    h, w, n = spec.height, spec.width, spec.n_regions

    sites = np.argsort(_raw(spec.seed, _STREAM_SEEDS, h * w), kind="stable")[:n]
    sy, sx = np.divmod(sites, w)
    yy, xx = np.mgrid[0:h, 0:w]
    dist = np.hypot(yy[None] - sy[:, None, None], xx[None] - sx[:, None, None])
    region = dist.argmin(axis=0)
    margin = dist - dist.min(axis=0)[None]
    R = R_LOW + (R_HIGH - R_LOW) * np.clip(1.0 - margin / BOUNDARY_BAND, 0.0, 1.0)

    classes = (_raw(spec.seed, _STREAM_CLASSES, n) % np.uint64(spec.n_classes)).astype(np.int64)
    n_ood = int(round(spec.ood_fraction * n))
    if spec.ood_fraction > 0:
        n_ood = max(n_ood, 1)
    n_ood = min(n_ood, n - 1)
    ood_regions = np.argsort(_raw(spec.seed, _STREAM_OOD, n), kind="stable")[:n_ood]
    is_ood = np.zeros(n, bool)
    is_ood[ood_regions] = True
    classes[is_ood] = spec.n_classes

    lo, hi = VALIDITY_RANGE
    V = lo + (hi - lo) * _uniform(_raw(spec.seed, _STREAM_VALIDITY, n))

    ood_pix = is_ood[region]
    clean = np.where(ood_pix, D_OOD, D_ID)[..., None]
    noise = _normal(spec.seed, _STREAM_NOISE, h * w).reshape(h, w, 1)
    noisy = np.clip(clean + spec.noise_sigma * noise, 0.0, 1.0)

    return Scene(
        spec=spec,
        gt_labels=classes[region].astype(np.uint8),
        ood_gt=ood_pix.astype(np.uint8),
        true_R=R.astype(np.float32),
        true_V=V.astype(np.float32),
        clean_D=clean.astype(np.float32),
        noisy_D=noisy.astype(np.float32),
        region_map=region.astype(np.uint16),
    )


def save_scene(scene, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    for name in SCENE_FILES:
        save_array(getattr(scene, name), os.path.join(out_dir, f"{name}.npy"))
    save_array(scene.region_map, os.path.join(out_dir, "region_map.npy"))
    _jsonfmt.write({"schema": 1, "spec": asdict(scene.spec)}, os.path.join(out_dir, "scene.json"))


def load_scene(scene_dir):
    with open(os.path.join(scene_dir, "scene.json"), encoding="utf-8") as fh:
        spec = SceneSpec(**json.load(fh)["spec"])
    arrays = {name: load_array(os.path.join(scene_dir, f"{name}.npy")) for name in SCENE_FILES}
    return Scene(spec=spec, region_map=load_array(os.path.join(scene_dir, "region_map.npy")), **arrays)


def oracle_pipeline(scene, mode="soft", threshold=0.5, D=None):
    """Assignment followed by fusion, written as plain loops over pixels and regions.

    Independent reference for the vectorised path; returns the ``(H, W)`` OOD map
    computed from ``D`` (default: the scene's noisy distribution).
    """
    R = scene.true_R.astype(np.float64).tolist()
    V = scene.true_V.astype(np.float64).tolist()
    D = (scene.noisy_D if D is None else D)[..., 0].astype(np.float64).tolist()
    n = len(V)
    h, w = len(D), len(D[0])

    assign = [[UNASSIGNED] * w for _ in range(h)]
    if mode == "soft":
        for i in range(h):
            for j in range(w):
                best, arg = -1.0, 0
                for k in range(n):
                    p = R[k][i][j] * V[k]
                    if p > best:
                        best, arg = p, k
                assign[i][j] = arg
    elif mode == "hard":
        for k in sorted(range(n), key=lambda k: (V[k], k)):
            for i in range(h):
                for j in range(w):
                    if R[k][i][j] >= threshold:
                        assign[i][j] = k
    else:
        raise ValueError(f"mode must be 'soft' or 'hard', got {mode!r}")

    sums = [0.0] * n
    counts = [0] * n
    for i in range(h):
        for j in range(w):
            k = assign[i][j]
            if k != UNASSIGNED:
                sums[k] += D[i][j]
                counts[k] += 1
    out = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            k = assign[i][j]
            out[i, j] = D[i][j] if k == UNASSIGNED else sums[k] / counts[k] * D[i][j]
    return out
