"""Inference-only pipeline: validate, assign, fuse, evaluate, write artifacts."""
import contextlib
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _jsonfmt
from .assignment import DEFAULT_THRESHOLD, hard_assign, proposals, soft_assign
from .core import IGNORE_LABEL, load_array, save_array, validate_bundle
from .errors import ConfigError, ModeError, RegionFuseError
from .fusion import ood_score_map, scf_fuse
from .mask_split import mask_components
from .metrics import DEFAULT_TAU_GRID, evaluate_ood, majority_vote_labels, seg_metrics
from .synth import SceneSpec, generate


@dataclass
class PipelineConfig:
    out: str
    R: Optional[str] = None
    V: Optional[str] = None
    D: Optional[str] = None
    gt: Optional[str] = None
    labels: Optional[str] = None
    n_classes: Optional[int] = None
    synth: Optional[SceneSpec] = None
    mode: str = "soft"
    threshold: float = DEFAULT_THRESHOLD
    connectivity: int = 8
    tau_grid: tuple = DEFAULT_TAU_GRID
    tpr_target: float = 0.95
    pred_threshold: object = "auto"
    ignore_label: int = IGNORE_LABEL
    seed: int = 0

    def validate(self):
        if self.mode not in ("soft", "hard"):
            raise ConfigError(f"mode must be 'soft' or 'hard', got {self.mode!r}")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError(f"threshold must lie in (0, 1), got {self.threshold}")
        if self.connectivity not in (4, 8):
            raise ConfigError(f"connectivity must be 4 or 8, got {self.connectivity}")
        if not self.tau_grid or not all(0.0 <= t <= 1.0 for t in self.tau_grid):
            raise ConfigError("tau grid must be a non-empty list of values in [0, 1]")
        if not 0.0 < self.tpr_target <= 1.0:
            raise ConfigError(f"tpr target must lie in (0, 1], got {self.tpr_target}")
        if self.pred_threshold != "auto" and not np.isfinite(float(self.pred_threshold)):
            raise ConfigError(f"pred threshold must be 'auto' or a number, got {self.pred_threshold!r}")
        if self.synth is None:
            for name in ("R", "V", "D", "gt"):
                path = getattr(self, name)
                if path is None:
                    raise ConfigError(f"missing --{name} (or use a synthetic scene)")
                if not os.path.isfile(path):
                    raise ConfigError(f"--{name} file not found: {path}")
        if self.labels is not None and not os.path.isfile(self.labels):
            raise ConfigError(f"--labels file not found: {self.labels}")
        if os.path.exists(self.out) and not os.path.isdir(self.out):
            raise ConfigError(f"output path exists and is not a directory: {self.out}")


@contextlib.contextmanager
def stage(name):
    """Prefix errors raised inside the block with the pipeline stage name."""
    try:
        yield
    except RegionFuseError as exc:
        raise type(exc)(f"stage '{name}': {exc}") from exc


def _inputs(config):
    if config.synth is not None:
        scene = generate(config.synth)
        return (
            scene.true_R,
            scene.true_V,
            scene.noisy_D,
            scene.ood_gt,
            scene.gt_labels,
            config.synth.n_classes + 1,
        )
    R = load_array(config.R, 3)
    V = load_array(config.V, 1)
    D = load_array(config.D)
    if D.ndim == 2:
        D = D[..., None]
    gt = load_array(config.gt, 2)
    labels = load_array(config.labels, 2) if config.labels else None
    return R, V, D, gt, labels, config.n_classes


def run_pipeline(config):
    """Run every stage in memory; returns ``(report_dict, artifacts)`` without touching disk."""
    config.validate()
    with stage("load"):
        R, V, D, gt, labels, n_classes = _inputs(config)
    with stage("validate"):
        validate_bundle(R, V, D)
        if D.shape[2] != 1:
            raise ModeError(f"OOD pipeline needs a single-channel D, got C == {D.shape[2]}")
    with stage("assign"):
        if config.mode == "soft":
            assignment = soft_assign(R, V)
        else:
            assignment = hard_assign(R, V, config.threshold)
        props = proposals(assignment, R.shape[0])
    with stage("fuse"):
        hybrid = scf_fuse(D, props)
        score_map = ood_score_map(hybrid)
    with stage("split"):
        gt_comp = mask_components(gt == 1, config.connectivity)
    with stage("eval"):
        report = evaluate_ood(
            score_map,
            gt,
            pred_threshold=config.pred_threshold,
            tpr_target=config.tpr_target,
            tau_grid=config.tau_grid,
            connectivity=config.connectivity,
            ignore_label=config.ignore_label,
        )
        voted = None
        if labels is not None:
            if n_classes is None:
                n_lab = labels[labels != config.ignore_label]
                n_classes = int(n_lab.max()) + 1 if n_lab.size else 1
            voted = majority_vote_labels(props, labels, config.ignore_label)
            m = seg_metrics(voted, labels, n_classes, config.ignore_label)
            report.miou, report.fwiou, report.macc, report.pacc = m

    report.params.update(
        mode=config.mode,
        threshold=float(config.threshold) if config.mode == "hard" else None,
        seed=int(config.seed),
        n_regions=int(R.shape[0]),
    )
    report.params = {k: v for k, v in report.params.items() if v is not None}
    report.counts["unassigned_pixels"] = assignment.n_unassigned
    report.counts["empty_regions"] = int(hybrid.empty_regions.size)
    out = report.to_dict()

    artifacts = {
        "assignment.npy": assignment.region_index,
        "score.npy": assignment.score.astype(np.float32),
        "hybrid.npy": hybrid.data.astype(np.float32),
        "gt_components.npy": gt_comp.label_image.astype(np.uint16),
        "proposals.json": proposal_index(assignment, V, props, config.mode, config.threshold),
        "region_means.json": region_means_index(hybrid),
        "report.json": out,
    }
    if voted is not None:
        artifacts["majority_labels.npy"] = voted
    return out, artifacts


def proposal_index(assignment, V, props, mode, threshold):
    counts = props.pixel_counts
    index = {
        "schema": 1,
        "mode": mode,
        "n_regions": int(props.n_regions),
        "shape": list(props.shape),
        "unassigned_pixels": assignment.n_unassigned,
        "regions": [
            {"region": n, "pixel_count": int(counts[n]), "validity": float(V[n])}
            for n in range(props.n_regions)
        ],
    }
    if mode == "hard":
        index["threshold"] = float(threshold)
    return index


def region_means_index(hybrid):
    return {
        "schema": 1,
        "n_regions": int(hybrid.region_pixels.size),
        "empty_regions": [int(n) for n in hybrid.empty_regions],
        "regions": [
            {"region": n, "pixel_count": count, "mean": means} for n, count, means in hybrid.region_table()
        ],
    }


def write_artifacts(artifacts, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    for name, obj in artifacts.items():
        path = os.path.join(out_dir, name)
        if name.endswith(".npy"):
            save_array(obj, path)
        else:
            _jsonfmt.write(obj, path)
