import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regionfuse import kernels
from regionfuse.assignment import class_fusion, hard_assign, proposals, soft_assign
from regionfuse.core import UNASSIGNED
from regionfuse.errors import ConsistencyError, RangeError, ShapeError

from .oracles import class_fusion_loop, soft_assign_loop


def _pixel(values):
    return np.asarray(values, dtype=np.float64).reshape(-1, 1, 1)


def test_identity_validity_is_plain_argmax(rng):
    R = rng.random((5, 6, 7))
    a = soft_assign(R, np.ones(5))
    np.testing.assert_array_equal(a.region_index, R.argmax(axis=0))


def test_soft_single_pixel():
    a = soft_assign(_pixel([0.9, 0.4]), np.array([0.5, 0.9]))
    assert a.region_index[0, 0] == 0
    assert a.score[0, 0] == pytest.approx(0.45, abs=1e-15)


def test_soft_tie_breaks_low():
    a = soft_assign(_pixel([0.5, 0.5]), np.array([1.0, 1.0]))
    assert a.region_index[0, 0] == 0


def test_soft_never_unassigned(rng):
    a = soft_assign(rng.random((3, 4, 4)) * 0.01, rng.random(3))
    assert a.n_unassigned == 0


def test_soft_matches_oracle(backend, rng):
    for _ in range(20):
        n, h, w = rng.integers(1, 9), rng.integers(1, 17), rng.integers(1, 17)
        R = rng.random((n, h, w))
        V = rng.random(n)
        idx, score = kernels.soft_assign(R, V, impl=backend)
        ref_idx, ref_score = soft_assign_loop(R, V)
        np.testing.assert_array_equal(idx, ref_idx)
        np.testing.assert_array_equal(score, ref_score)


def test_soft_rejects_bad_inputs():
    with pytest.raises(ShapeError, match="N: 2 vs 3"):
        soft_assign(np.zeros((2, 2, 2)), np.zeros(3))
    with pytest.raises(RangeError):
        soft_assign(np.full((1, 1, 1), 1.5), np.ones(1))
    with pytest.raises(ShapeError):
        soft_assign(np.zeros((2, 2, 2)), np.zeros((2, 2)))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(1e-3, 1.0))
def test_soft_invariant_to_validity_scale(seed, scale):
    rng = np.random.default_rng(seed)
    R = rng.random((4, 5, 5))
    V = rng.random(4)
    base = soft_assign(R, V).region_index
    # scaling can round distinct products together; compare only where the winner is clear
    prods = np.sort(R * V[:, None, None], axis=0)
    clear = prods[-1] - prods[-2] > 1e-9
    scaled = soft_assign(R, V * scale).region_index
    np.testing.assert_array_equal(base[clear], scaled[clear])


def test_hard_stacking_example():
    R = np.array([[[0.6, 0.2]], [[0.7, 0.7]]])
    a = hard_assign(R, np.array([0.3, 0.9]), 0.5)
    np.testing.assert_array_equal(a.region_index, [[1, 1]])
    np.testing.assert_allclose(a.score, [[0.63, 0.63]])


def test_hard_higher_validity_overwrites():
    R = np.array([[[0.9]], [[0.6]]])
    assert hard_assign(R, np.array([0.8, 0.2]), 0.5).region_index[0, 0] == 0


def test_hard_equal_validity_higher_index_wins():
    R = np.array([[[0.9]], [[0.6]]])
    assert hard_assign(R, np.array([0.5, 0.5]), 0.5).region_index[0, 0] == 1


def test_hard_unassigned_below_threshold():
    a = hard_assign(_pixel([0.1, 0.4]), np.array([1.0, 1.0]), 0.5)
    assert a.region_index[0, 0] == UNASSIGNED and a.score[0, 0] == 0.0


def test_hard_single_region_covers_everything(rng):
    R = rng.uniform(0.5, 1.0, (1, 6, 6))
    for v in (0.01, 0.99):
        assert (hard_assign(R, np.array([v]), 0.5).region_index == 0).all()


def test_hard_threshold_bounds():
    with pytest.raises(ValueError):
        hard_assign(np.zeros((1, 1, 1)), np.ones(1), 1.0)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t1=st.floats(0.01, 0.98), dt=st.floats(0.0, 0.5))
def test_hard_monotone_threshold(seed, t1, dt):
    rng = np.random.default_rng(seed)
    R = rng.random((4, 6, 6))
    V = rng.random(4)
    t2 = min(t1 + dt, 0.99)
    low = hard_assign(R, V, t1).region_index == UNASSIGNED
    high = hard_assign(R, V, t2).region_index == UNASSIGNED
    assert not (low & ~high).any()


def test_class_fusion_one_hot(rng):
    R = rng.random((1, 3, 4))
    Y = class_fusion(R, np.array([[0.0, 1.0, 0.0]]))
    np.testing.assert_array_equal(Y[..., 1], R[0])
    assert not Y[..., [0, 2]].any()


def test_class_fusion_symmetric_pixel():
    Y = class_fusion(_pixel([0.5, 0.5]), np.eye(2))
    np.testing.assert_allclose(Y[0, 0], [0.5, 0.5])


def test_class_fusion_matches_loop(backend, rng):
    R = rng.random((3, 2, 2))
    V = rng.random((3, 4))
    np.testing.assert_allclose(kernels.class_fusion(R, V, impl=backend), class_fusion_loop(R, V), rtol=0, atol=1e-6)


def test_class_fusion_linear(backend, rng):
    R = rng.random((4, 5, 5))
    V1, V2 = rng.random((4, 3)), rng.random((4, 3))
    lhs = kernels.class_fusion(R, V1 + V2, impl=backend)
    rhs = kernels.class_fusion(R, V1, impl=backend) + kernels.class_fusion(R, V2, impl=backend)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-6)


def test_class_fusion_needs_matrix():
    with pytest.raises(ShapeError):
        class_fusion(np.zeros((2, 2, 2)), np.zeros(2))


def test_proposals_partition_for_soft(rng):
    R = rng.random((4, 8, 8))
    p = proposals(soft_assign(R, rng.random(4)), 4)
    assert p.exhaustive
    np.testing.assert_array_equal(p.masks.sum(axis=0), 1)


def test_proposals_hard_not_exhaustive():
    R = np.array([[[0.9, 0.1]]])
    p = proposals(hard_assign(R, np.ones(1), 0.5), 1)
    assert not p.exhaustive and p.masks.sum() == 1


def test_proposals_two_by_one():
    from regionfuse.core import AssignmentMap

    a = AssignmentMap(np.array([[0], [1]], np.uint16), np.zeros((2, 1)))
    p = proposals(a, 2)
    np.testing.assert_array_equal(p.mask(0), [[1], [0]])
    np.testing.assert_array_equal(p.mask(1), [[0], [1]])


def test_proposals_index_too_large():
    from regionfuse.core import AssignmentMap

    with pytest.raises(ConsistencyError):
        proposals(AssignmentMap(np.array([[2]], np.uint16), np.zeros((1, 1))), 2)
