"""Evaluation statistics for mixed data.

The reconstruction quality metric ``msem`` mixes scaled numeric MSE with
one minus balanced accuracy per categorical variable; ``mc_distance``
compares mixed correlation matrices (Spearman rho, Cramer's V, eta
squared by pair type). Degenerate inputs raise rather than returning
silent zeros, with one exception: silhouette's 0/0 -> 0 convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateTable,
    EmptyGroup,
    LengthMismatch,
    SchemaMismatch,
    SingleClassTruth,
    SingleCluster,
    ZeroVariance,
)
from .tabular import Dataset, EncoderState


class ConfusionCounts(NamedTuple):
    tp: int
    tn: int
    fp: int
    fn: int


def confusion_counts(y_true: np.ndarray, y_pred: np.ndarray) -> ConfusionCounts:
    y_true = np.asarray(y_true).astype(bool)
    y_pred = np.asarray(y_pred).astype(bool)
    if y_true.shape != y_pred.shape:
        raise LengthMismatch("y_true and y_pred must have equal length")
    return ConfusionCounts(
        tp=int(np.sum(y_true & y_pred)),
        tn=int(np.sum(~y_true & ~y_pred)),
        fp=int(np.sum(~y_true & y_pred)),
        fn=int(np.sum(y_true & ~y_pred)),
    )


def balanced_accuracy(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """(sensitivity + specificity) / 2; truth must contain both classes."""
    c = confusion_counts(y_true, y_pred)
    if c.tp + c.fn == 0 or c.tn + c.fp == 0:
        raise SingleClassTruth("y_true contains a single class")
    return 0.5 * (c.tp / (c.tp + c.fn) + c.tn / (c.tn + c.fp))


class PredictionError(NamedTuple):
    mse: float
    mae: float
    rmse: float


def prediction_error(y_true: np.ndarray, y_pred: np.ndarray) -> PredictionError:
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.size < 1:
        raise LengthMismatch("need equal-length vectors with at least one entry")
    d = y_true - y_pred
    mse = float(np.mean(d * d))
    return PredictionError(mse=mse, mae=float(np.mean(np.abs(d))), rmse=float(np.sqrt(mse)))


class ClassificationScores(NamedTuple):
    f1: float
    balanced_accuracy: float
    accuracy: float
    f1_defined: bool


def classification_scores(y_true: np.ndarray, y_pred: np.ndarray) -> ClassificationScores:
    """F1, balanced accuracy and accuracy.

    F1 is reported as 0 with ``f1_defined=False`` when no positives are
    predicted or none are present.
    """
    c = confusion_counts(y_true, y_pred)
    n = c.tp + c.tn + c.fp + c.fn
    denom = 2 * c.tp + c.fp + c.fn
    f1_defined = (c.tp + c.fp) > 0 and (c.tp + c.fn) > 0
    return ClassificationScores(
        f1=2 * c.tp / denom if denom > 0 else 0.0,
        balanced_accuracy=balanced_accuracy(y_true, y_pred),
        accuracy=(c.tp + c.tn) / n,
        f1_defined=f1_defined,
    )


# ----------------------------------------------------------------------
# Pairwise association statistics
# ----------------------------------------------------------------------

def _average_ranks(x: np.ndarray) -> np.ndarray:
    # Average rank of ties: mean of the 1-based positions of each value block.
    _, inverse, counts = np.unique(x, return_inverse=True, return_counts=True)
    cum = np.cumsum(counts)
    avg = (cum - counts + 1 + cum) / 2.0
    return avg[inverse]


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation of average ranks; ties allowed."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.size < 2:
        raise LengthMismatch("need two equal-length vectors of size >= 2")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = np.sum(dx * dx)
    sy = np.sum(dy * dy)
    if sx == 0.0 or sy == 0.0:
        raise ZeroVariance("rank vector is constant")
    return float(np.sum(dx * dy) / np.sqrt(sx * sy))


def cramers_v(a: np.ndarray, b: np.ndarray) -> float:
    """Cramer's V on the contingency table, without bias correction."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.size < 1:
        raise LengthMismatch("need two equal-length vectors")
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    r = ai.max() + 1
    c = bi.max() + 1
    if r < 2 or c < 2:
        raise DegenerateTable("both variables need >= 2 observed categories")
    n = a.size
    table = np.zeros((r, c))
    np.add.at(table, (ai, bi), 1.0)
    expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / n
    chi2 = float(np.sum((table - expected) ** 2 / expected))
    return float(np.sqrt(chi2 / (n * min(r - 1, c - 1))))


def eta_squared(x: np.ndarray, g: np.ndarray) -> float:
    """Between-group over total sum of squares (categorical explains numeric)."""
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g)
    if x.shape != g.shape or x.size < 2:
        raise LengthMismatch("need two equal-length vectors of size >= 2")
    _, gi, counts = np.unique(g, return_inverse=True, return_counts=True)
    if counts.size < 2:
        raise EmptyGroup("need at least 2 non-empty groups")
    total = x - x.mean()
    sst = float(np.sum(total * total))
    if sst == 0.0:
        raise ZeroVariance("x has zero total variance")
    sums = np.zeros(counts.size)
    np.add.at(sums, gi, x)
    means = sums / counts
    ssb = float(np.sum(counts * (means - x.mean()) ** 2))
    return ssb / sst


# ----------------------------------------------------------------------
# Mixed correlation
# ----------------------------------------------------------------------

SPEARMAN = "spearman"
CRAMERS_V = "cramers_v"
ETA_SQUARED = "eta_squared"


@dataclass(frozen=True)
class MixedCorrelationMatrix:
    """p x p symmetric matrix with the entry statistic chosen per pair type."""

    schema_names: tuple[str, ...]
    values: np.ndarray
    kinds: np.ndarray  # object array of statistic names

    @property
    def p(self) -> int:
        return len(self.schema_names)


def mixed_correlation(data: Dataset) -> MixedCorrelationMatrix:
    """Spearman for numeric pairs, Cramer's V for categorical pairs,
    eta squared for mixed pairs; diagonal fixed at 1."""
    cols = data.schema.columns
    p = len(cols)
    values = np.eye(p)
    kinds = np.empty((p, p), dtype=object)
    for i in range(p):
        kinds[i, i] = CRAMERS_V if cols[i].is_categorical else SPEARMAN
    for i in range(p):
        for j in range(i + 1, p):
            ci, cj = cols[i], cols[j]
            xi = data.column(ci.name)
            xj = data.column(cj.name)
            if not ci.is_categorical and not cj.is_categorical:
                kind, v = SPEARMAN, spearman(xi, xj)
            elif ci.is_categorical and cj.is_categorical:
                kind, v = CRAMERS_V, cramers_v(xi, xj)
            elif ci.is_categorical:
                kind, v = ETA_SQUARED, eta_squared(xj, xi)
            else:
                kind, v = ETA_SQUARED, eta_squared(xi, xj)
            values[i, j] = values[j, i] = v
            kinds[i, j] = kinds[j, i] = kind
    return MixedCorrelationMatrix(data.schema.names, values, kinds)


def mc_distance(d1: Dataset, d2: Dataset) -> float:
    """Sum of absolute entry differences over unordered off-diagonal pairs."""
    if d1.schema != d2.schema:
        raise SchemaMismatch("datasets must share a schema")
    m1 = mixed_correlation(d1)
    m2 = mixed_correlation(d2)
    diff = np.abs(m1.values - m2.values)
    return float(np.sum(np.triu(diff, k=1)))


# ----------------------------------------------------------------------
# MSEM
# ----------------------------------------------------------------------

def msem(
    original: Dataset, reconstructed: Dataset, enc: EncoderState | None = None
) -> float:
    """Mean of scaled numeric MSE and (1 - balanced accuracy) per variable.

    Numeric columns are compared after min-max scaling — by the ranges in
    ``enc`` when given (the autoencoder's working space), otherwise by
    ranges fitted on ``original``. Each categorical variable scores the
    mean balanced accuracy of its per-category one-hot indicators.
    """
    if original.schema != reconstructed.schema:
        raise SchemaMismatch("datasets must share a schema")
    if original.n != reconstructed.n:
        raise SchemaMismatch("datasets must have the same number of rows")
    total = 0.0
    for c in original.schema.columns:
        x = original.column(c.name)
        r = reconstructed.column(c.name)
        if c.is_categorical:
            accs = [
                balanced_accuracy(x == k, r == k) for k in range(len(c.categories))
            ]
            total += 1.0 - float(np.mean(accs))
        else:
            if enc is not None:
                lo, hi = enc.numeric_range[c.name]
            else:
                lo, hi = float(x.min()), float(x.max())
                if hi <= lo:
                    raise ZeroVariance(f"numeric column {c.name!r} is constant")
            d = (x - r) / (hi - lo)
            total += float(np.mean(d * d))
    return total / original.schema.p


# ----------------------------------------------------------------------
# Clustering quality and ranking
# ----------------------------------------------------------------------

def silhouette(points: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette with Euclidean distances; singleton points score 0."""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    if points.ndim != 2 or points.shape[0] != labels.shape[0]:
        raise LengthMismatch("points must be n x d with one label per row")
    n = points.shape[0]
    if n < 3:
        raise LengthMismatch("need at least 3 points")
    _, li, counts = np.unique(labels, return_inverse=True, return_counts=True)
    k = counts.size
    if k < 2:
        raise SingleCluster("need at least 2 clusters")

    # direct differences, chunked over rows: the |x|^2 + |y|^2 - 2xy form
    # loses ~1e-10 relative precision for well-separated clusters
    dist = np.empty((n, n))
    step = max(1, 2**22 // max(1, n * points.shape[1]))
    for start in range(0, n, step):
        block = points[start : start + step, None, :] - points[None, :, :]
        dist[start : start + step] = np.sqrt(np.sum(block * block, axis=2))

    onehot = np.zeros((n, k))
    onehot[np.arange(n), li] = 1.0
    sums = dist @ onehot  # total distance from each point to each cluster

    own_count = counts[li]
    with np.errstate(invalid="ignore", divide="ignore"):
        a = sums[np.arange(n), li] / np.maximum(own_count - 1, 1)
    mean_other = sums / counts[None, :]
    mean_other[np.arange(n), li] = np.inf
    b = mean_other.min(axis=1)

    denom = np.maximum(a, b)
    s = np.where(denom > 0.0, (b - a) / np.where(denom > 0.0, denom, 1.0), 0.0)
    s = np.where(own_count == 1, 0.0, s)
    return float(np.mean(s))


def rank_auc(y_true: np.ndarray, scores: np.ndarray) -> float:
    """Binary AUC via the Mann-Whitney rank statistic (average ranks for ties)."""
    y_true = np.asarray(y_true).astype(bool)
    scores = np.asarray(scores, dtype=np.float64)
    if y_true.shape != scores.shape:
        raise LengthMismatch("y_true and scores must have equal length")
    n_pos = int(y_true.sum())
    n_neg = y_true.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassTruth("AUC needs both classes in y_true")
    ranks = _average_ranks(scores)
    return float((ranks[y_true].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))
