"""Training objectives as pure functions with analytic gradients.

Both losses reduce by the mean; numpy's pairwise summation keeps the result
independent of scheduling.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ShapeError

BCE_EPS = 1e-7
HUBER_DELTA = 1.0


@dataclass(frozen=True)
class LossValue:
    value: float
    gradient: np.ndarray


def _pair(pred, target):
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"pred and target differ in shape: {pred.shape} vs {target.shape}")
    if pred.size == 0:
        raise ShapeError("loss of an empty array is undefined")
    return pred, target


def bce_loss(pred, target, eps=BCE_EPS):
    """Mean binary cross-entropy of probabilities ``pred`` against binary ``target``.

    ``pred`` is clamped to ``[eps, 1 - eps]`` before the log.
    """
    p, y = _pair(pred, target)
    p = np.clip(p, eps, 1.0 - eps)
    per = -(y * np.log(p) + (1.0 - y) * np.log1p(-p))
    grad = (p - y) / (p * (1.0 - p)) / p.size
    return LossValue(float(np.mean(per)), grad)


def huber_loss(pred, target, delta=HUBER_DELTA):
    """Mean Huber loss: ``r**2 / 2`` for ``|r| <= delta``, else ``delta * (|r| - delta / 2)``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    p, t = _pair(pred, target)
    r = p - t
    a = np.abs(r)
    per = np.where(a <= delta, 0.5 * r * r, delta * (a - 0.5 * delta))
    grad = np.clip(r, -delta, delta) / r.size
    return LossValue(float(np.mean(per)), grad)


def grad_check(loss, point, h=1e-5):
    """Largest coordinate-wise relative error between ``loss(point).gradient`` and central differences.

    ``loss`` maps an array to a :class:`LossValue`. Relative error is
    ``|g - g_fd| / max(|g|, |g_fd|, 1e-12)``.
    """
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    x = np.array(point, dtype=np.float64)
    analytic = np.asarray(loss(x).gradient, dtype=np.float64)
    numeric = np.empty_like(x)
    flat = x.reshape(-1)
    out = numeric.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = loss(x).value
        flat[i] = orig - h
        down = loss(x).value
        flat[i] = orig
        if not (np.isfinite(up) and np.isfinite(down)):
            raise NumericError(f"non-finite loss when perturbing coordinate {i}")
        out[i] = (up - down) / (2.0 * h)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-12)
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_all(seed=0, n_points=100, h=1e-5):
    """Gradient checks over ``n_points`` seeded points per loss; yields ``(line, passed)``.

    BCE and Huber must agree with central differences to 1e-5; Huber points
    within ``h`` of the kink get 1e-4.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        y = (rng.random(8) < 0.5).astype(np.float64)
        p = rng.uniform(0.05, 0.95, 8)
        worst = max(worst, grad_check(lambda x: bce_loss(x, y), p, h))
    yield f"bce_loss    max rel err {worst:.3e} (tol 1e-05)", worst <= 1e-5

    worst = worst_kink = 0.0
    for _ in range(n_points):
        t = rng.normal(0.0, 1.0, 16)
        p = t + rng.normal(0.0, 1.5, 16)
        err = grad_check(lambda x: huber_loss(x, t), p, h)
        if np.any(np.abs(np.abs(p - t) - HUBER_DELTA) <= h):
            worst_kink = max(worst_kink, err)
        else:
            worst = max(worst, err)
    yield f"huber_loss  max rel err {worst:.3e} (tol 1e-05)", worst <= 1e-5

    t = rng.normal(0.0, 1.0, 16)
    p = t + np.where(rng.random(16) < 0.5, HUBER_DELTA, -HUBER_DELTA)
    worst_kink = max(worst_kink, grad_check(lambda x: huber_loss(x, t), p, h))
    yield f"huber kink  max rel err {worst_kink:.3e} (tol 1e-04)", worst_kink <= 1e-4
