"""Uniform sampling with repetition and the sample-then-optimise center routine."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .assign import best_centers
from .bitcore import CenterSet, Dataset, coord_counts
from .relations import RelationFamily


class Rng:
    """Seeded stream with reproducible, order-independent child streams.

    ``derive(i, j, ...)`` depends only on the master seed and the path of
    indices, never on how much any sibling stream has been consumed.
    """

    def __init__(self, seed: int, path: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self.gen = np.random.Generator(np.random.PCG64(ss))

    def derive(self, *idx: int) -> Rng:
        return Rng(self.seed, self.path + tuple(idx))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, path={self.path})"


def log2_term(eps: float) -> float:
    """log2(1/eps), clamped to 1 once eps >= 1."""
    return 1.0 if eps >= 1 else math.log2(1.0 / eps)


def sample_size_r(k: int, eps: float, c: float = 2.0) -> int:
    """ceil(c * k / eps^2 * log2(1/eps)), at least 1."""
    if k < 1 or eps <= 0 or c <= 0:
        raise ValueError(f"need k >= 1, eps > 0, c > 0 (got k={k}, eps={eps}, c={c})")
    return max(1, math.ceil(c * k / eps**2 * log2_term(eps)))


def sample_multisets(X: Dataset, k: int, r: int, rng: Rng, active: np.ndarray | None = None) -> np.ndarray:
    """(k, r) row indices into X, drawn uniformly with repetition from ``active``."""
    pool = np.arange(X.n) if active is None else np.asarray(active, dtype=np.intp)
    if pool.size == 0:
        raise ValueError("cannot sample from an empty set")
    if r < 1:
        raise ValueError("r must be positive")
    return pool[rng.gen.integers(0, pool.size, size=(k, r))]


def algorithm_a(
    X: Dataset,
    k: int,
    F: RelationFamily,
    delta: float,
    eps: float,
    weights: Sequence,
    rng: Rng,
    *,
    c: float = 2.0,
    r: int | None = None,
    active: np.ndarray | None = None,
) -> CenterSet:
    """Sample k multisets of r vectors and return the weighted best centers.

    ``delta`` only enters the approximation guarantee, not the computation.
    ``r`` overrides the sample size derived from ``eps`` and ``c``.
    """
    if F.arity != k or len(weights) != k:
        raise ValueError(f"relation arity {F.arity} and {len(weights)} weights must both equal k={k}")
    if r is None:
        r = sample_size_r(k, eps, c)
    idx = sample_multisets(X, k, r, rng, active)
    counts = coord_counts([X.bits[row] for row in idx], X.dim)
    return best_centers(counts, weights, F)
