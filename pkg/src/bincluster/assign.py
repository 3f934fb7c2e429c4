"""Coordinate-wise center optimisation.

Given per-set zero/one counts and a weight per set, the cost of choosing
tuple b at coordinate i is

    f_i(b) = sum_{j: b_j = 1} w_j * zeros[j, i] + sum_{j: b_j = 0} w_j * ones[j, i]

and coordinates do not interact, so the best center set is assembled one
coordinate at a time from the argmin tuple of each relation.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from fractions import Fraction
from numbers import Integral, Rational

import numpy as np

from .bitcore import CenterSet, CoordCounts, Dataset, coord_counts, nearest
from .relations import RelationError, RelationFamily

UNASSIGNED = -1

_INT64_SAFE = 1 << 62


def exact_weights(weights: Sequence) -> np.ndarray:
    """Weights as an array on which f_i can be evaluated without rounding.

    Integers and rationals are scaled to a common denominator (the argmin is
    scale invariant); anything else is taken as float64.
    """
    ws = list(weights)
    if any(w < 0 for w in ws):
        raise ValueError("weights must be nonnegative")
    if all(isinstance(w, (Integral, Rational)) for w in ws):
        fr = [Fraction(w) for w in ws]
        den = math.lcm(*(f.denominator for f in fr)) if fr else 1
        ints = [int(f * den) for f in fr]
        return np.array(ints, dtype=object if max(ints, default=0) >= _INT64_SAFE else np.int64)
    return np.asarray(ws, dtype=np.float64)


def _objective(table: np.ndarray, w: np.ndarray, zeros: np.ndarray, ones: np.ndarray) -> np.ndarray:
    """f values, shape (|R|, number of coordinates)."""
    if w.dtype == np.int64:
        bound = int(w.max(initial=0)) * int(max(zeros.max(initial=0), ones.max(initial=0)) + 1) * max(len(w), 1)
        if bound >= _INT64_SAFE:
            w = w.astype(object)
    if w.dtype == object:
        zeros = zeros.astype(object)
        ones = ones.astype(object)
        tab = table.astype(object)
    else:
        tab = table.astype(w.dtype)
        zeros = zeros.astype(w.dtype)
        ones = ones.astype(w.dtype)
    base = w @ ones
    return base[None, :] + tab @ (w[:, None] * (zeros - ones))


def best_centers(counts: CoordCounts, weights: Sequence, F: RelationFamily) -> CenterSet:
    k = F.arity
    if counts.k_sets != k or len(weights) != k:
        raise ValueError(f"need {k} count sets and weights, got {counts.k_sets} and {len(weights)}")
    if counts.dim != F.m:
        raise ValueError(f"counts cover {counts.dim} coordinates, family {F.m}")
    w = exact_weights(weights)
    out = np.zeros((k, F.m), dtype=np.uint8)
    for g, rel in enumerate(F.groups):
        coords = F.coords(g)
        if coords.size == 0:
            continue
        if len(rel) == 0:
            raise RelationError("empty relation")
        f = _objective(rel.table, w, counts.zeros[:, coords], counts.ones[:, coords])
        choice = np.argmin(f, axis=0) if f.dtype != object else _object_argmin(f)
        out[:, coords] = rel.table[choice].T
    return CenterSet(out, tuple(range(1, k + 1)))


def _object_argmin(f: np.ndarray) -> np.ndarray:
    return np.array([min(range(f.shape[0]), key=lambda t: (f[t, c], t)) for c in range(f.shape[1])], dtype=np.intp)


def induced_partition(X: Dataset, C: CenterSet) -> np.ndarray:
    """Cluster label (0-based) of each point under nearest-center assignment."""
    _, labels = nearest(X, C)
    return labels


def cluster_counts(X: Dataset, labels: np.ndarray, k: int) -> CoordCounts:
    labels = np.asarray(labels)
    if labels.shape != (X.n,):
        raise ValueError("one label per point required")
    if labels.size and (labels.max() >= k or labels.min() < UNASSIGNED):
        raise ValueError("label out of range")
    return coord_counts([X.bits[labels == j] for j in range(k)], X.dim)


def partition_optimal_centers(X: Dataset, labels: np.ndarray, F: RelationFamily) -> CenterSet:
    """Centers minimising the summed per-cluster cost for a fixed partition."""
    counts = cluster_counts(X, labels, F.arity)
    return best_centers(counts, [1] * F.arity, F)


def partition_cost(X: Dataset, labels: np.ndarray, C: CenterSet) -> int:
    """Sum over clusters j of the distances of members of cluster j to c_j."""
    labels = np.asarray(labels)
    total = 0
    for j in range(C.size):
        members = X.bits[labels == j]
        total += int(np.count_nonzero(members != C.bits[j][None, :]))
    return total
