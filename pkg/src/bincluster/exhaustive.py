"""Exact and exhaustive solvers for small instances.

``oracle_opt`` enumerates every assignment of points to clusters. For a fixed
assignment the best centers are found coordinate by coordinate (the cost of
a tuple b at coordinate i is the number of members of cluster j disagreeing
with b_j, summed over j), so the minimum over assignments is the optimum.

``ptas`` enumerates k-tuples of r-element multisets of the data together
with integer weight vectors summing to n and keeps the cheapest best-center
set they produce.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement, product

import numpy as np

from .assign import best_centers, induced_partition
from .bitcore import CenterSet, CoordCounts, Dataset, cost
from .relations import RelationError, RelationFamily
from .sampler import sample_size_r
from .solver import Solution

ORACLE_LIMIT = 10**7
PTAS_LIMIT = 5 * 10**8
_CHUNK = 1 << 14


class BudgetExceeded(RuntimeError):
    pass


def _assignments(n: int, k: int, start: int, stop: int) -> np.ndarray:
    """Rows start..stop-1 of the base-k enumeration of all labelings of n points."""
    codes = np.arange(start, stop, dtype=np.int64)
    out = np.empty((codes.size, n), dtype=np.int64)
    for p in range(n - 1, -1, -1):
        out[:, p] = codes % k
        codes //= k
    return out


def _partition_costs(bits: np.ndarray, labels: np.ndarray, F: RelationFamily) -> np.ndarray:
    """Sum over clusters of member-to-center distances with per-partition optimal centers."""
    k = F.arity
    onehot = (labels[:, :, None] == np.arange(k)[None, None, :]).astype(np.int64)  # (A, n, k)
    ones = np.einsum("ank,nm->akm", onehot, bits.astype(np.int64))
    sizes = onehot.sum(axis=1)  # (A, k)
    zeros = sizes[:, :, None] - ones
    total = np.zeros(labels.shape[0], dtype=np.int64)
    for g, rel in enumerate(F.groups):
        coords = F.coords(g)
        if coords.size == 0:
            continue
        tab = rel.table.astype(np.int64)  # (t, k)
        # disagreement of cluster j with entry b_j: zeros if b_j = 1 else ones
        g_val = np.einsum("tk,akc->atc", tab, zeros[:, :, coords]) + np.einsum(
            "tk,akc->atc", 1 - tab, ones[:, :, coords]
        )
        total += g_val.min(axis=1).sum(axis=1)
    return total


def oracle_opt(X: Dataset, k: int, F: RelationFamily, limit: int = ORACLE_LIMIT) -> Solution:
    if F.arity != k:
        raise ValueError(f"family arity {F.arity} differs from k={k}")
    if any(len(rel) == 0 for rel in F.groups):
        raise RelationError("empty relation in family")
    n = X.n
    total = k**n
    if total > limit:
        raise BudgetExceeded(f"{k}^{n} = {total} assignments exceeds the oracle limit {limit}; use a smaller instance")
    best_val, best_code = None, 0
    for start in range(0, total, _CHUNK):
        stop = min(total, start + _CHUNK)
        labels = _assignments(n, k, start, stop)
        vals = _partition_costs(X.bits, labels, F)
        i = int(vals.argmin())
        if best_val is None or vals[i] < best_val:
            best_val, best_code = int(vals[i]), start + i
    labels = _assignments(n, k, best_code, best_code + 1)[0]
    counts = CoordCounts(
        zeros=np.stack([(X.bits[labels == j] == 0).sum(axis=0) for j in range(k)]).astype(np.int64),
        ones=np.stack([X.bits[labels == j].sum(axis=0) for j in range(k)]).astype(np.int64),
    ) if n else CoordCounts(np.zeros((k, X.dim), np.int64), np.zeros((k, X.dim), np.int64))
    centers = best_centers(counts, [1] * k, F)
    value = cost(X, centers) if n else 0
    assert value <= (best_val or 0)
    return Solution(
        centers=centers,
        cost=value,
        assignment=induced_partition(X, centers) if n else np.zeros(0, dtype=np.int64),
        index_set=tuple(range(1, k + 1)),
        mode="oracle",
        meta={"assignments": total},
    )


def compositions(n: int, k: int):
    """All k-tuples of nonnegative integers summing to n, in lexicographic order."""
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def ptas_space_size(n: int, k: int, r: int) -> int:
    multisets = math.comb(n + r - 1, r)
    total = 0
    for w in compositions(n, k):
        total += multisets ** sum(1 for x in w if x)
    return total


def _decision_table(rel_table: np.ndarray, weights: np.ndarray, r: int) -> np.ndarray:
    """Argmin tuple index for every vector of one-counts in {0..r}^k (row-major)."""
    k = rel_table.shape[1]
    grid = np.array(list(product(range(r + 1), repeat=k)), dtype=np.int64)  # (G, k) one-counts
    tab = rel_table.astype(np.int64)
    # f(b) = sum_j w_j * (zeros_j if b_j else ones_j)
    ones = grid * weights[None, :]
    zeros = (r - grid) * weights[None, :]
    f = zeros @ tab.T + ones @ (1 - tab).T  # (G, t)
    return f.argmin(axis=1)


def ptas(X: Dataset, k: int, F: RelationFamily, eps: float, c: float = 2.0, limit: int = PTAS_LIMIT) -> Solution:
    """Exhaustive weighted-multiset search; at most (1 + eps) times the optimum."""
    if F.arity != k:
        raise ValueError(f"family arity {F.arity} differs from k={k}")
    if any(len(rel) == 0 for rel in F.groups):
        raise RelationError("empty relation in family")
    n, m = X.n, X.dim
    r = sample_size_r(k, eps, c)
    if n == 0:
        C = best_centers(CoordCounts(np.zeros((k, m), np.int64), np.zeros((k, m), np.int64)), [0] * k, F)
        return Solution(C, 0, np.zeros(0, dtype=np.int64), index_set=tuple(range(1, k + 1)), mode="ptas")
    space = ptas_space_size(n, k, r)
    if space > limit:
        raise BudgetExceeded(f"ptas search space {space} exceeds limit {limit} (n={n}, k={k}, r={r})")

    # one-count vectors of every r-multiset of X
    msets = np.array(list(combinations_with_replacement(range(n), r)), dtype=np.intp)
    mcounts = X.bits[msets].sum(axis=1, dtype=np.int64)  # (M, m)
    sizes = np.array([len(F.relation(i)) for i in range(m)], dtype=object)
    radices = [int(x) for x in sizes]
    packable = math.prod(radices) < (1 << 62)
    strides = np.array([math.prod(radices[i + 1 :]) for i in range(m)], dtype=np.int64) if packable else None
    radix = r + 1
    place = np.array([radix ** (k - 1 - j) for j in range(k)], dtype=np.int64)
    reached: set = set()
    for w in compositions(n, k):
        w_arr = np.array(w, dtype=np.int64)
        live = [j for j in range(k) if w[j]]
        tables = {g: _decision_table(rel.table, w_arr, r) for g, rel in enumerate(F.groups)}
        # zero-weight sets contribute nothing: pin them to a single placeholder
        code = np.zeros((1, m), dtype=np.int64)
        for j in live:
            code = (code[:, None, :] + mcounts[None, :, :] * place[j]).reshape(-1, m)
        for start in range(0, code.shape[0], _CHUNK * 8):
            block = code[start : start + _CHUNK * 8]
            tidx = np.empty_like(block)
            for g in tables:
                coords = F.coords(g)
                tidx[:, coords] = tables[g][block[:, coords]]
            if packable:
                reached.update(np.unique(tidx @ strides).tolist())
            else:
                reached.update(map(tuple, np.unique(tidx, axis=0).tolist()))

    best_val, best_C = None, None
    for key in sorted(reached):
        if packable:
            tidx = (key // strides) % np.array(radices, dtype=np.int64)
        else:
            tidx = np.array(key, dtype=np.int64)
        bits = np.empty((k, m), dtype=np.uint8)
        for i in range(m):
            bits[:, i] = F.relation(i).table[tidx[i]]
        C = CenterSet(bits, tuple(range(1, k + 1)))
        val = cost(X, C)
        if best_val is None or val < best_val:
            best_val, best_C = val, C
    return Solution(
        centers=best_C,
        cost=best_val,
        assignment=induced_partition(X, best_C),
        index_set=tuple(range(1, k + 1)),
        mode="ptas",
        meta={"r": r, "space": space, "distinct_center_sets": len(reached)},
    )
