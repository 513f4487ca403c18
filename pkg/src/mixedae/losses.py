"""Reconstruction losses for one-hot encoded mixed data.

The standard MSE over an encoded batch treats every encoded column
equally, so rare categories contribute almost nothing to the loss and
get reconstructed last. The balanced variant weighs each one-hot
column's squared errors by how often the ground truth is 1 vs 0:

    weight when target = 1:   n / (2 * p_q * n_kq)
    weight when target = 0:   n / (2 * p_q * (n - n_kq))

where ``n_kq`` is the category's training count and ``p_q`` the number
of categories of its variable. This equalizes three influences at once:
between categories of one variable, between categorical variables of
different cardinality, and between the categorical block and min-max
scaled numeric columns (whose weights stay 1). Numeric feature errors
are untouched in both losses.

All losses return ``(value, gradient_wrt_predictions)`` and share the
same 1/(B*P) normalizer over the encoded batch, so their magnitudes are
directly comparable in learning-curve overlays. Weights are computed
once from the training-split :class:`~mixedae.tabular.EncoderState` and
frozen for the run; the weight selector is the ground-truth entry, never
the prediction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    AlphaOutOfRange,
    DegenerateCategory,
    NonBinaryTarget,
    ShapeError,
)
from .tabular import EncoderState


@dataclass(frozen=True)
class LossWeights:
    """Per encoded feature: weight applied when the target is 1 resp. 0."""

    w_one: np.ndarray
    w_zero: np.ndarray
    is_categorical: np.ndarray  # bool per encoded feature

    def __post_init__(self) -> None:
        for name in ("w_one", "w_zero", "is_categorical"):
            a = np.ascontiguousarray(getattr(self, name))
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        if not (self.w_one.shape == self.w_zero.shape == self.is_categorical.shape):
            raise ShapeError("weight arrays must share one shape")

    @property
    def width(self) -> int:
        return self.w_one.shape[0]

    @classmethod
    def unit(cls, width: int, is_categorical: np.ndarray | None = None) -> "LossWeights":
        """All-ones weights; the balanced loss then equals the standard MSE."""
        if is_categorical is None:
            is_categorical = np.zeros(width, dtype=bool)
        return cls(np.ones(width), np.ones(width), np.asarray(is_categorical, dtype=bool))


def compute_balance_weights(enc: EncoderState) -> LossWeights:
    """Balance weights from training counts; numeric features get (1, 1).

    Raises :class:`DegenerateCategory` when some ``n_kq`` is 0 or n: the
    weight would be singular, and silently clamping it would mask a
    pathological split.
    """
    n = enc.n
    w1 = np.ones(enc.width)
    w0 = np.ones(enc.width)
    is_cat = np.zeros(enc.width, dtype=bool)
    for j, f in enumerate(enc.features):
        if f.category is None:
            continue
        counts = enc.category_counts[f.column]
        n_kq = int(counts[f.category])
        p_q = len(counts)
        if n_kq < 1 or n_kq > n - 1:
            raise DegenerateCategory(
                f"category {f.name!r} has count {n_kq} of {n}; balance weight singular"
            )
        w1[j] = n / (2.0 * p_q * n_kq)
        w0[j] = n / (2.0 * p_q * (n - n_kq))
        is_cat[j] = True
    return LossWeights(w1, w0, is_cat)


def _check_shapes(pred: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape or pred.ndim != 2:
        raise ShapeError(f"pred {pred.shape} and target {target.shape} must be equal 2-d shapes")
    return pred, target


def mse_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared error over the whole encoded batch.

    value = (1/(B*P)) * sum (t - p)^2, gradient = (2/(B*P)) * (p - t).
    """
    pred, target = _check_shapes(pred, target)
    diff = target - pred
    scale = 1.0 / diff.size
    value = float(np.sum(diff * diff) * scale)
    grad = (2.0 * scale) * (pred - target)
    return value, grad


def balanced_mse_loss(
    pred: np.ndarray, target: np.ndarray, weights: LossWeights
) -> tuple[float, np.ndarray]:
    """Weighted MSE with the target entry selecting the weight.

    Reduces exactly (bitwise) to :func:`mse_loss` when all weights are 1.
    Categorical targets must be hard 0/1; anything else would make the
    weight selector ambiguous.
    """
    pred, target = _check_shapes(pred, target)
    if pred.shape[1] != weights.width:
        raise ShapeError(f"weights cover {weights.width} features, batch has {pred.shape[1]}")
    cat = target[:, weights.is_categorical]
    if not np.all((cat == 0.0) | (cat == 1.0)):
        raise NonBinaryTarget("categorical target entries must be exactly 0 or 1")
    w = np.where(target == 1.0, weights.w_one, weights.w_zero)
    diff = target - pred
    scale = 1.0 / diff.size
    value = float(np.sum(w * diff * diff) * scale)
    grad = (2.0 * scale) * w * (pred - target)
    return value, grad


def blended_loss(
    alpha: float, pred: np.ndarray, target: np.ndarray, weights: LossWeights
) -> tuple[float, np.ndarray]:
    """Convex combination: alpha * MSE + (1 - alpha) * balanced MSE."""
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must be in [0, 1], got {alpha}")
    v1, g1 = mse_loss(pred, target)
    v2, g2 = balanced_mse_loss(pred, target, weights)
    return alpha * v1 + (1.0 - alpha) * v2, alpha * g1 + (1.0 - alpha) * g2


def cross_entropy_loss(
    pred: np.ndarray, target: np.ndarray, groups: Sequence[np.ndarray]
) -> tuple[float, np.ndarray]:
    """Per-variable softmax cross-entropy benchmark.

    ``groups`` lists the encoded-column indices of each categorical
    variable; those columns of ``pred`` are treated as logits and scored
    by the negative log-likelihood of the true category. Remaining
    columns are numeric and contribute squared error. The value is the
    mean over rows and variables. Benchmark-only path: it is excluded
    from the balanced-vs-standard comparisons.
    """
    pred, target = _check_shapes(pred, target)
    B, P = pred.shape
    in_group = np.zeros(P, dtype=bool)
    for g in groups:
        in_group[np.asarray(g)] = True
    numeric = np.flatnonzero(~in_group)
    n_vars = len(groups) + numeric.size
    scale = 1.0 / (B * n_vars)

    grad = np.zeros_like(pred)
    diff = pred[:, numeric] - target[:, numeric]
    value = float(np.sum(diff * diff))
    grad[:, numeric] = 2.0 * diff

    for g in groups:
        g = np.asarray(g)
        logits = pred[:, g]
        t = target[:, g]
        m = logits.max(axis=1, keepdims=True)
        lse = m + np.log(np.exp(logits - m).sum(axis=1, keepdims=True))
        value += float(np.sum(lse[:, 0] - (logits * t).sum(axis=1)))
        grad[:, g] = np.exp(logits - lse) - t
    return value * scale, grad * scale
