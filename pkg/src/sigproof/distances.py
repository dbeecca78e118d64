"""The three matching distances over feature vectors: DTW, l1, cosine.

All three are deliberately simple. Feature vectors are treated as ordered
scalar sequences by DTW; l1 and cosine require equal dimensions. The
``distance`` dispatcher applies the one pipeline-level guard: a zero vector
under cosine yields the maximal distance 2.0 instead of an error, since a
blank channel carries no similarity evidence.
"""

from __future__ import annotations

import numpy as np

from .errors import (ChannelMismatch, DimMismatch, EmptyVector, UnknownMetric,
                     ZeroVector)
from .features.vector import FeatureVector

METRICS = ("dtw", "l1", "cosine")

COSINE_MAX = 2.0


def _check_pair(a: FeatureVector, b: FeatureVector, same_dim: bool) -> None:
    if a.channel != b.channel:
        raise ChannelMismatch(f"cannot compare channels {a.channel!r} and {b.channel!r}")
    if same_dim and a.dim != b.dim:
        raise DimMismatch(f"dims differ: {a.dim} vs {b.dim} on channel {a.channel!r}")


def l1_distance(a: FeatureVector, b: FeatureVector) -> float:
    _check_pair(a, b, same_dim=True)
    return _l1(a.values, b.values)


def _l1(av: np.ndarray, bv: np.ndarray) -> float:
    return float(np.abs(av - bv).sum())


def cosine_distance(a: FeatureVector, b: FeatureVector) -> float:
    _check_pair(a, b, same_dim=True)
    return _cosine(a.values, b.values)


def _cosine(av: np.ndarray, bv: np.ndarray) -> float:
    # plain reductions, no BLAS, so scalar and matrix paths agree bit-for-bit
    na = float(np.sqrt((av * av).sum()))
    nb = float(np.sqrt((bv * bv).sum()))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine distance is undefined for a zero vector")
    d = 1.0 - float((av * bv).sum()) / (na * nb)
    return min(max(d, 0.0), COSINE_MAX)


def dtw_distance(a: FeatureVector, b: FeatureVector) -> float:
    _check_pair(a, b, same_dim=False)
    return _dtw(a.values, b.values)


def _dtw(av: np.ndarray, bv: np.ndarray) -> float:
    """Boundary-anchored DTW with steps (i-1,j), (i,j-1), (i-1,j-1).

    Cell cost is |a_i - b_j|; the terminal cumulative cost is returned
    without path-length normalization. The cumulative matrix is filled
    along anti-diagonals so each sweep is one vectorized numpy op.
    """
    n, m = av.size, bv.size
    if n == 0 or m == 0:
        raise EmptyVector("DTW needs two non-empty sequences")
    cost = np.abs(av[:, None] - bv[None, :])
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for k in range(2, n + m + 1):
        i_lo = max(1, k - m)
        i_hi = min(n, k - 1)
        if i_lo > i_hi:
            continue
        i = np.arange(i_lo, i_hi + 1)
        j = k - i
        acc[i, j] = cost[i - 1, j - 1] + np.minimum(
            np.minimum(acc[i - 1, j], acc[i, j - 1]), acc[i - 1, j - 1])
    return float(acc[n, m])


_DISPATCH = {"l1": l1_distance, "cosine": cosine_distance, "dtw": dtw_distance}


def distance(metric: str, a: FeatureVector, b: FeatureVector) -> float:
    """Metric dispatch; cosine's zero-vector case maps to the max distance."""
    try:
        fn = _DISPATCH[metric]
    except KeyError:
        raise UnknownMetric(f"unknown metric {metric!r}; know {METRICS}") from None
    if metric == "cosine":
        try:
            return fn(a, b)
        except ZeroVector:
            return COSINE_MAX
    return fn(a, b)


# -- matrix forms used by the population/evaluation hot loops -----------

_CHUNK_ELEMS = 4_000_000


def pairwise_matrix(A: np.ndarray, B: np.ndarray, metric: str) -> np.ndarray:
    """All-pairs distance matrix (len(A) x len(B)) for stacked vectors.

    Matches the scalar functions elementwise, including the cosine
    zero-vector substitution.
    """
    if metric not in METRICS:
        raise UnknownMetric(f"unknown metric {metric!r}; know {METRICS}")
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    n, m = A.shape[0], B.shape[0]
    if metric == "dtw":
        out = np.empty((n, m))
        for i in range(n):
            for j in range(m):
                out[i, j] = _dtw(A[i], B[j])
        return out

    out = np.empty((n, m))
    rows = max(1, _CHUNK_ELEMS // max(1, m * A.shape[1]))
    if metric == "l1":
        for lo in range(0, n, rows):
            hi = min(lo + rows, n)
            out[lo:hi] = np.abs(A[lo:hi, None, :] - B[None, :, :]).sum(axis=2)
        return out

    an = np.sqrt((A * A).sum(axis=1))
    bn = np.sqrt((B * B).sum(axis=1))
    for lo in range(0, n, rows):
        hi = min(lo + rows, n)
        out[lo:hi] = (A[lo:hi, None, :] * B[None, :, :]).sum(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = 1.0 - out / np.outer(an, bn)
    out[an == 0.0, :] = COSINE_MAX
    out[:, bn == 0.0] = COSINE_MAX
    return np.clip(out, 0.0, COSINE_MAX)
