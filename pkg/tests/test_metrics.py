import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regionfuse.core import ProposalSet, UNASSIGNED
from regionfuse.errors import UndefinedMetricError
from regionfuse.mask_split import mask_components
from regionfuse.metrics import (
    DEFAULT_TAU_GRID,
    aupr,
    auroc,
    evaluate_ood,
    evaluate_seg,
    fpr_at_tpr,
    majority_vote_labels,
    mean_f1,
    operating_point,
    seg_metrics,
    siou_gt,
)

from .oracles import aupr_sweep, auroc_pairwise, fpr_sweep, siou_sets


def _random_scores(rng, n=None):
    n = n or int(rng.integers(2, 400))
    # coarse quantisation creates plenty of ties
    scores = np.round(rng.random(n), int(rng.integers(1, 4)))
    labels = (rng.random(n) < rng.uniform(0.1, 0.9)).astype(np.int64)
    labels[0], labels[1] = 0, 1
    return scores, labels


# ------------------------------------------------------------------ pixel level


def test_auroc_hand_example():
    assert auroc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75


def test_auroc_separated_and_ties():
    assert auroc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
    assert auroc([0.3] * 6, [0, 1, 0, 1, 1, 0]) == 0.5


def test_aupr_hand_example():
    assert aupr([0.9, 0.6, 0.3], [1, 0, 1]) == pytest.approx(0.5 + 0.5 * 2 / 3, abs=1e-15)
    assert aupr([0.9, 0.8, 0.1], [1, 1, 0]) == 1.0


def test_fpr_hand_example():
    scores = [0.9, 0.8, 0.7, 0.2, 0.1, 0.3]
    labels = [1, 1, 1, 1, 0, 0]
    fpr, thr = operating_point(scores, labels)
    assert fpr == 0.5 and thr == 0.2


def test_fpr_trivial_cases():
    assert fpr_at_tpr([0.9, 0.8, 0.1], [1, 1, 0]) == 0.0
    assert fpr_at_tpr([0.5] * 4, [1, 0, 1, 0]) == 1.0


def test_single_class_is_undefined():
    for fn in (auroc, aupr, fpr_at_tpr):
        with pytest.raises(UndefinedMetricError):
            fn([0.1, 0.2], [1, 1])


def test_pixel_metrics_match_oracles(rng):
    for _ in range(15):
        s, y = _random_scores(rng)
        assert abs(auroc(s, y) - auroc_pairwise(s, y)) <= 1e-9
        assert abs(aupr(s, y) - aupr_sweep(s, y)) <= 1e-9
        assert operating_point(s, y) == pytest.approx(fpr_sweep(s, y), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_pixel_metrics_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    s, y = _random_scores(rng)
    perm = rng.permutation(s.size)
    for fn in (auroc, aupr, fpr_at_tpr):
        assert fn(s, y) == pytest.approx(fn(s[perm], y[perm]), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_pixel_metrics_monotone_transform_invariant(seed):
    rng = np.random.default_rng(seed)
    s, y = _random_scores(rng)
    t = np.exp(3.0 * s) - 7.0
    for fn in (auroc, aupr, fpr_at_tpr):
        assert fn(s, y) == pytest.approx(fn(t, y), abs=1e-12)


def test_against_sklearn(rng):
    sk = pytest.importorskip("sklearn.metrics")
    s, y = _random_scores(rng, 1000)
    assert auroc(s, y) == pytest.approx(sk.roc_auc_score(y, s), abs=1e-9)
    assert aupr(s, y) == pytest.approx(sk.average_precision_score(y, s), abs=1e-9)


# -------------------------------------------------------------- component level


def test_siou_hand_example():
    gt = np.zeros((3, 6), np.uint8)
    gt[0, 0:4] = 1
    pred = np.zeros((3, 6), bool)
    pred[0, 0:3] = True
    pred[1, 2:4] = True  # 2 background px
    per, mean = siou_gt(pred, mask_components(gt == 1))
    assert per.tolist() == [0.5] and mean == 0.5


def test_siou_adjustment_example():
    gt = np.zeros((3, 6), np.uint8)
    gt[0, 0:4] = 1  # K
    gt[2, 4] = 1  # other component
    pred = np.zeros((3, 6), bool)
    pred[0, 0:3] = True
    pred[1, 3] = True  # background
    pred[2, 4] = True  # lies on the other gt component
    comps = mask_components(gt == 1, 8)
    per, _ = siou_gt(pred, comps, 8)
    assert per[0] == pytest.approx(0.6, abs=1e-15)


def test_siou_exact_match():
    gt = np.zeros((5, 5), np.uint8)
    gt[1:3, 1:4] = 1
    per, mean = siou_gt(gt == 1, mask_components(gt == 1))
    assert mean == 1.0


def test_siou_needs_components():
    with pytest.raises(UndefinedMetricError):
        siou_gt(np.ones((3, 3), bool), mask_components(np.zeros((3, 3), bool)))


def test_siou_ignore_drops_predictions():
    gt = np.zeros((1, 6), np.uint8)
    gt[0, :2] = 1
    pred = np.ones((1, 6), bool)
    ignore = np.zeros((1, 6), bool)
    ignore[0, 2:] = True
    _, mean = siou_gt(pred, mask_components(gt == 1), ignore=ignore)
    assert mean == 1.0


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), conn=st.sampled_from([4, 8]))
def test_siou_matches_set_oracle(seed, conn):
    rng = np.random.default_rng(seed)
    gt = rng.random((10, 10)) < 0.3
    if not gt.any():
        gt[0, 0] = True
    pred = rng.random((10, 10)) < 0.35
    comps = mask_components(gt, conn)
    per, _ = siou_gt(pred, comps, conn)
    ref = siou_sets(pred, [c.mask for c in comps], conn)
    np.testing.assert_allclose(per, ref, rtol=0, atol=1e-12)
    assert ((per >= 0) & (per <= 1)).all()
    # the adjustment can only raise the score above plain IoU of K against P
    preds = mask_components(pred, conn)
    for k, c in enumerate(comps):
        P = np.zeros_like(gt)
        for p in preds:
            if (p.mask & c.mask).any():
                P |= p.mask
        union = (P | c.mask).sum()
        assert per[k] >= (P & c.mask).sum() / union - 1e-12


def test_mean_f1_hand_example():
    gt = np.zeros((1, 12), np.uint8)
    gt[0, 4:8] = 1  # K: 4 px
    pred = np.zeros((1, 12), bool)
    pred[0, 5:10] = True  # 3 on K, 2 off -> sIoU 3/6, PPV 3/5
    g, p = mask_components(gt == 1), mask_components(pred)
    assert mean_f1(p, g) == pytest.approx(5 / 11, abs=1e-12)


def test_mean_f1_trivial():
    gt = np.zeros((4, 4), np.uint8)
    gt[:2, :2] = 1
    g = mask_components(gt == 1)
    assert mean_f1(g, g) == 1.0
    assert mean_f1(mask_components(np.zeros((4, 4), bool)), g) == 0.0
    with pytest.raises(UndefinedMetricError):
        empty = mask_components(np.zeros((4, 4), bool))
        mean_f1(empty, empty)


def test_default_tau_grid():
    assert DEFAULT_TAU_GRID == (0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75)


# ------------------------------------------------------------------- semantic


def test_seg_hand_example():
    m = seg_metrics(np.array([[0, 1], [1, 1]]), np.array([[0, 0], [1, 1]]), 2)
    assert m.miou == pytest.approx((0.5 + 2 / 3) / 2, abs=1e-15)
    assert m.pacc == 0.75 and m.macc == 0.75
    assert m.fwiou == pytest.approx(0.5833333333, abs=1e-9)


def test_seg_perfect_and_unassigned(rng):
    gt = rng.integers(0, 4, (6, 6))
    assert seg_metrics(gt, gt, 4) == (1.0, 1.0, 1.0, 1.0)
    m = seg_metrics(np.full((6, 6), UNASSIGNED), gt, 4)
    assert m.pacc == 0.0 and m.miou == 0.0


def test_seg_ignores_gt_ignore():
    gt = np.array([[0, 255], [1, 1]])
    pred = np.array([[0, 1], [1, 1]])
    assert seg_metrics(pred, gt, 2).pacc == 1.0


def test_evaluate_seg_report():
    d = evaluate_seg(np.array([[0, 1], [1, 1]]), np.array([[0, 0], [1, 1]]), 2).to_dict()
    assert d["schema"] == 1 and set(d["metrics"]) == {"miou", "fwiou", "macc", "pacc"}


def _props(index, n):
    return ProposalSet(np.asarray(index, np.uint16), n)


def test_majority_vote_examples():
    gt = np.array([[1, 1, 1, 2, 2]])
    assert majority_vote_labels(_props([[0] * 5], 1), gt).tolist() == [[1] * 5]
    gt = np.array([[1, 1, 2, 2]])
    assert majority_vote_labels(_props([[0] * 4], 1), gt).tolist() == [[1] * 4]
    gt = np.array([[3, 3, 3]])
    assert majority_vote_labels(_props([[0] * 3], 1), gt).tolist() == [[3] * 3]


def test_majority_vote_ignore_and_unassigned():
    gt = np.array([[255, 255, 2, 255]])
    out = majority_vote_labels(_props([[0, 0, 1, UNASSIGNED]], 2), gt)
    assert out.tolist() == [[255, 255, 2, 255]]
    # ignore pixels do not vote even when they are the majority
    out = majority_vote_labels(_props([[0, 0, 0]], 1), np.array([[255, 255, 4]]))
    assert out.tolist() == [[4, 4, 4]]


# --------------------------------------------------------------------- driver


def test_evaluate_ood_perfect():
    gt = np.zeros((8, 8), np.uint8)
    gt[2:4, 2:5] = 1
    d = evaluate_ood(gt.astype(float), gt).to_dict()
    assert d["metrics"] == {"aupr": 1.0, "fpr95": 0.0, "auroc": 1.0, "siou_gt": 1.0, "mean_f1": 1.0}
    assert d["counts"]["gt_components"] == 1 and d["pred_threshold"] == 1.0


def test_evaluate_ood_rejects_foreign_labels():
    with pytest.raises(ValueError):
        evaluate_ood(np.zeros((2, 2)), np.array([[0, 1], [2, 0]]))


def test_evaluate_ood_no_gt_component():
    gt = np.zeros((3, 3), np.uint8)
    with pytest.raises(UndefinedMetricError):
        evaluate_ood(np.zeros((3, 3)), gt)


def test_evaluate_ood_batch_sums_counts(rng):
    gt = np.zeros((2, 6, 6), np.uint8)
    gt[0, :2, :2] = 1
    gt[1, 4:, 4:] = 1
    scores = gt + 0.1 * rng.random(gt.shape)
    rep = evaluate_ood(scores, gt)
    assert rep.counts["images"] == 2 and rep.counts["gt_components"] == 2
    assert rep.mean_f1 == 1.0
