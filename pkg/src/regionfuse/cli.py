"""``region-fuse`` command line.

Exit codes: 0 success, 2 configuration error, 3 data or format error,
4 undefined metric.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import _jsonfmt
from ._backend import set_threads
from .assignment import DEFAULT_THRESHOLD, hard_assign, proposals, soft_assign
from .core import IGNORE_LABEL, ProposalSet, load_array, save_array
from .errors import ConfigError, RegionFuseError, UndefinedMetricError
from .fusion import scf_fuse
from .mask_split import split_labels
from .metrics import DEFAULT_TAU_GRID, evaluate_ood, evaluate_seg
from .pipeline import PipelineConfig, proposal_index, region_means_index, run_pipeline, write_artifacts
from .synth import SceneSpec, generate, save_scene

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_METRIC = 0, 2, 3, 4


def _existing(path):
    if not os.path.isfile(path):
        raise ConfigError(f"file not found: {path}")
    return path


def _size(text):
    try:
        h, w = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like HxW, got {text!r}") from None
    return h, w


def _grid(text):
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"tau grid must be comma-separated numbers, got {text!r}") from None


def _pred_thresh(text):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--pred-thresh must be 'auto' or a number, got {text!r}") from None


def _emit(obj, out):
    if out:
        _jsonfmt.write(obj, out)
    else:
        sys.stdout.write(_jsonfmt.dumps(obj))


# ------------------------------------------------------------------ subcommands


def cmd_split(args):
    labels = load_array(_existing(args.labels), 2)
    comps = split_labels(labels, args.connectivity, args.ignore_label)
    os.makedirs(args.out, exist_ok=True)
    entries = []
    for c in comps:
        name = f"component_{c.component_id:05d}.npy"
        save_array(c.mask, os.path.join(args.out, name))
        entries.append(
            {"component_id": c.component_id, "class_id": c.class_id, "pixel_count": c.pixel_count, "file": name}
        )
    index = {
        "schema": 1,
        "connectivity": args.connectivity,
        "shape": list(labels.shape),
        "components": entries,
    }
    _jsonfmt.write(index, os.path.join(args.out, "components.json"))
    return EXIT_OK


def cmd_assign(args):
    R = load_array(_existing(args.R), 3)
    V = load_array(_existing(args.V), 1)
    if args.mode == "soft":
        a = soft_assign(R, V)
    else:
        a = hard_assign(R, V, args.threshold)
    props = proposals(a, R.shape[0])
    os.makedirs(args.out, exist_ok=True)
    save_array(a.region_index, os.path.join(args.out, "assignment.npy"))
    save_array(a.score.astype(np.float32), os.path.join(args.out, "score.npy"))
    _jsonfmt.write(
        proposal_index(a, V, props, args.mode, args.threshold), os.path.join(args.out, "proposals.json")
    )
    return EXIT_OK


def _load_proposals(directory):
    index_path = os.path.join(directory, "proposals.json")
    _existing(index_path)
    with open(index_path, encoding="utf-8") as fh:
        index = json.load(fh)
    assignment = load_array(_existing(os.path.join(directory, "assignment.npy")), 2)
    return ProposalSet(assignment, int(index["n_regions"]))


def cmd_fuse(args):
    D = load_array(_existing(args.D))
    if D.ndim == 2:
        D = D[..., None]
    props = _load_proposals(args.proposals)
    hybrid = scf_fuse(D, props)
    save_array(hybrid.data.astype(np.float32), args.out)
    _jsonfmt.write(region_means_index(hybrid), os.path.splitext(args.out)[0] + ".json")
    return EXIT_OK


def cmd_eval_ood(args):
    scores = load_array(_existing(args.scores))
    gt = load_array(_existing(args.gt))
    if scores.ndim == 3 and gt.ndim == 2 and scores.shape[2] == 1:
        scores = scores[..., 0]
    report = evaluate_ood(
        scores,
        gt,
        pred_threshold=args.pred_thresh,
        tpr_target=args.tpr_target,
        tau_grid=args.tau_grid,
        connectivity=args.connectivity,
        ignore_label=args.ignore_label,
    )
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def cmd_eval_seg(args):
    pred = load_array(_existing(args.pred))
    gt = load_array(_existing(args.gt))
    report = evaluate_seg(pred, gt, args.classes, args.ignore_label)
    _emit(report.to_dict(), args.out)
    return EXIT_OK


def _spec_from(args):
    h, w = args.size
    return SceneSpec(
        seed=args.seed,
        height=h,
        width=w,
        n_regions=args.regions,
        n_classes=args.classes,
        ood_fraction=args.ood_frac,
        noise_sigma=args.sigma,
    )


def cmd_synth(args):
    if args.check_losses:
        from .losses import check_all

        ok = True
        for line, passed in check_all(seed=args.seed):
            print(line)
            ok &= passed
        if not ok:
            return 1
    if args.out:
        save_scene(generate(_spec_from(args)), args.out)
    elif not args.check_losses:
        raise ConfigError("synth needs --out (or --check-losses)")
    return EXIT_OK


def cmd_pipeline(args):
    synth = _spec_from(args) if args.synth else None
    config = PipelineConfig(
        out=args.out,
        R=args.R,
        V=args.V,
        D=args.D,
        gt=args.gt,
        labels=args.labels,
        n_classes=args.n_classes,
        synth=synth,
        mode=args.mode,
        threshold=args.threshold,
        connectivity=args.connectivity,
        tau_grid=args.tau_grid,
        tpr_target=args.tpr_target,
        pred_threshold=args.pred_thresh,
        ignore_label=args.ignore_label,
        seed=args.seed,
    )
    report, artifacts = run_pipeline(config)
    write_artifacts(artifacts, args.out)
    if not args.quiet:
        sys.stdout.write(_jsonfmt.dumps(report["metrics"]))
    return EXIT_OK


# ------------------------------------------------------------------------ parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="cap kernel threads (env REGION_FUSE_THREADS)")

    conn = argparse.ArgumentParser(add_help=False)
    conn.add_argument("--connectivity", type=int, choices=(4, 8), default=8)
    conn.add_argument("--ignore-label", type=int, default=IGNORE_LABEL)

    ood = argparse.ArgumentParser(add_help=False)
    ood.add_argument("--pred-thresh", type=_pred_thresh, default="auto")
    ood.add_argument("--tpr-target", type=float, default=0.95)
    ood.add_argument("--tau-grid", type=_grid, default=DEFAULT_TAU_GRID)

    scene = argparse.ArgumentParser(add_help=False)
    scene.add_argument("--seed", type=int, default=0)
    scene.add_argument("--size", type=_size, default=(64, 64), metavar="HxW")
    scene.add_argument("--regions", type=int, default=12)
    scene.add_argument("--classes", type=int, default=5)
    scene.add_argument("--ood-frac", type=float, default=0.2)
    scene.add_argument("--sigma", type=float, default=0.15)

    parser = argparse.ArgumentParser(prog="region-fuse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", parents=[common, conn], help="split a label map into connected components")
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("assign", parents=[common], help="soft or hard region assignment")
    p.add_argument("--mode", choices=("soft", "hard"), default="soft")
    p.add_argument("--R", required=True)
    p.add_argument("--V", required=True)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("fuse", parents=[common], help="structure-constrained fusion")
    p.add_argument("--D", required=True)
    p.add_argument("--proposals", required=True, help="directory written by 'assign'")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("eval-ood", parents=[common, conn, ood], help="pixel and component OOD metrics")
    p.add_argument("--scores", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval_ood)

    p = sub.add_parser("eval-seg", parents=[common], help="semantic segmentation metrics")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--ignore-label", type=int, default=IGNORE_LABEL)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval_seg)

    p = sub.add_parser("synth", parents=[common, scene], help="write a synthetic scene")
    p.add_argument("--out")
    p.add_argument("--check-losses", action="store_true", help="run loss gradient checks")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", parents=[common, conn, ood, scene], help="assign, fuse and evaluate")
    p.add_argument("--R")
    p.add_argument("--V")
    p.add_argument("--D")
    p.add_argument("--gt", help="binary OOD ground truth (0, 1, ignore)")
    p.add_argument("--labels", help="semantic labels for majority-vote proposal scoring")
    p.add_argument("--n-classes", type=int)
    p.add_argument("--synth", action="store_true", help="generate the inputs from the scene options")
    p.add_argument("--mode", choices=("soft", "hard"), default="soft")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--out", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        set_threads(args.threads)
        return args.func(args)
    except ConfigError as exc:
        print(f"region-fuse: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UndefinedMetricError as exc:
        print(f"region-fuse: undefined metric: {exc}", file=sys.stderr)
        return EXIT_METRIC
    except (RegionFuseError, ValueError, OSError) as exc:
        print(f"region-fuse: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
