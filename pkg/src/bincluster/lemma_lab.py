"""Monte Carlo check of the sampling estimate for relation tuples.

Given a relation R, success probabilities p and weights w, draw r Bernoulli
samples per position, let Q be the empirical means, pick the tuple rho of R
closest to Q in weighted L1 distance and record D = d^w(rho, p). The claim
under test is E[D] <= (1 + eps) * d_min with d_min = min over R of d^w(x, p).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .relations import Relation, RelationError
from .sampler import Rng, sample_size_r

# trials simulated per vectorized batch; each batch draws from its own stream
CHUNK = 4096


def weighted_distance(u: Sequence[float], v: Sequence[float], w: Sequence[float]) -> float:
    u, v, w = (np.asarray(a, dtype=np.float64) for a in (u, v, w))
    if not (u.shape == v.shape == w.shape):
        raise ValueError("vectors and weights must have equal lengths")
    return float(np.sum(w * np.abs(u - v)))


def _distances(table: np.ndarray, points: np.ndarray, w: np.ndarray) -> np.ndarray:
    """(B, t) weighted distances from each of B points to each relation tuple."""
    return np.abs(points[:, None, :] - table[None, :, :]) @ w


def dmin(R: Relation, p: Sequence[float], w: Sequence[float]) -> tuple[float, tuple[int, ...]]:
    if len(R) == 0:
        raise RelationError("empty relation")
    p = np.asarray(p, dtype=np.float64)
    d = _distances(R.table.astype(np.float64), p[None, :], np.asarray(w, dtype=np.float64))[0]
    j = int(d.argmin())  # table rows are in canonical order
    return float(d[j]), tuple(int(b) for b in R.table[j])


@dataclass(frozen=True)
class SamplingProblem:
    R: Relation
    p: tuple[float, ...]
    w: tuple[float, ...]
    eps: float
    r: int

    def __post_init__(self):
        if len(self.R) == 0:
            raise RelationError("empty relation")
        k = self.R.arity
        if len(self.p) != k or len(self.w) != k:
            raise ValueError(f"p and w must have length k={k}")
        if any(not 0 <= x <= 1 for x in self.p):
            raise ValueError("probabilities must lie in [0, 1]")
        if any(x < 0 for x in self.w):
            raise ValueError("weights must be nonnegative")
        if self.r < 1 or self.eps <= 0:
            raise ValueError("need r >= 1 and eps > 0")

    @classmethod
    def with_formula(cls, R: Relation, p, w, eps: float, c: float = 2.0) -> SamplingProblem:
        return cls(R, tuple(map(float, p)), tuple(map(float, w)), eps, sample_size_r(R.arity, eps, c))

    @property
    def k(self) -> int:
        return self.R.arity


@dataclass(frozen=True)
class TrialStats:
    trials: int
    mean: float
    m2: float  # sum of squared deviations from the mean
    d_min: float
    eps: float

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")

    @property
    def variance(self) -> float:
        return self.m2 / (self.trials - 1) if self.trials > 1 else 0.0

    @property
    def se(self) -> float:
        return math.sqrt(self.variance / self.trials)

    @property
    def bound(self) -> float:
        return (1 + self.eps) * self.d_min + 3 * self.se

    @property
    def passed(self) -> bool:
        # a hair of float slack so that mean == d_min exactly always passes
        return self.mean <= self.bound + 1e-12 * max(1.0, self.d_min)

    def merge(self, other: TrialStats) -> TrialStats:
        """Chan et al. pairwise combination; symmetric up to rounding."""
        n = self.trials + other.trials
        delta = other.mean - self.mean
        mean = self.mean + delta * other.trials / n
        m2 = self.m2 + other.m2 + delta * delta * self.trials * other.trials / n
        return TrialStats(n, mean, m2, self.d_min, self.eps)

    @classmethod
    def from_values(cls, values: np.ndarray, d_min: float, eps: float) -> TrialStats:
        values = np.asarray(values, dtype=np.float64)
        mean = float(values.mean())
        return cls(values.size, mean, float(((values - mean) ** 2).sum()), d_min, eps)


def simulate(prob: SamplingProblem, size: int, rng: Rng) -> tuple[np.ndarray, np.ndarray]:
    """D values and chosen tuple indices for ``size`` independent trials."""
    table = prob.R.table.astype(np.float64)
    p = np.asarray(prob.p)
    w = np.asarray(prob.w)
    Q = rng.gen.binomial(prob.r, p, size=(size, prob.k)) / prob.r
    rho = _distances(table, Q, w).argmin(axis=1)
    D = (np.abs(table[rho] - p[None, :]) * w).sum(axis=1)
    return D, rho


def sampling_trial(prob: SamplingProblem, rng: Rng) -> float:
    D, _ = simulate(prob, 1, rng)
    return float(D[0])


MIN_TRIALS = 100


def sampling_experiment(prob: SamplingProblem, T: int, rng: Rng, chunk: int = CHUNK) -> TrialStats:
    if T < MIN_TRIALS:
        raise ValueError(f"need at least {MIN_TRIALS} trials for a meaningful standard error")
    d, _ = dmin(prob.R, prob.p, prob.w)
    stats = None
    for b, start in enumerate(range(0, T, chunk)):
        D, _ = simulate(prob, min(chunk, T - start), rng.derive(b))
        part = TrialStats.from_values(D, d, prob.eps)
        stats = part if stats is None else stats.merge(part)
    return stats


def random_problem(gen: np.random.Generator, eps: float, c: float = 2.0, max_k: int = 4) -> SamplingProblem:
    k = int(gen.integers(1, max_k + 1))
    size = int(gen.integers(1, 2**k + 1))
    R = Relation(k, gen.choice(2**k, size=size, replace=False))
    p = gen.random(k)
    w = gen.integers(1, 11, size=k)
    return SamplingProblem.with_formula(R, p, w, eps, c)


def c_sweep(
    seed: int, count: int, eps: float, T: int, cs: Sequence[float] = (1.0, 2.0, 4.0)
) -> list[dict]:
    """Pass statistics of ``count`` random problems at each sample-size constant."""
    rows = []
    for c in cs:
        gen = np.random.default_rng(seed)
        for i in range(count):
            prob = random_problem(gen, eps, c)
            st = sampling_experiment(prob, T, Rng(seed, (i,)))
            rows.append(stats_row(i, prob, st, c=c))
    return rows


def stats_row(i: int, prob: SamplingProblem, st: TrialStats, **extra) -> dict:
    return {
        "problem": i,
        **extra,
        "k": prob.k,
        "relation_size": len(prob.R),
        "r": prob.r,
        "eps": prob.eps,
        "trials": st.trials,
        "mean": st.mean,
        "se": st.se,
        "d_min": st.d_min,
        "bound": st.bound,
        "passed": st.passed,
    }
