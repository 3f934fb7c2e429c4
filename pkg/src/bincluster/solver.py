"""Randomized approximation scheme: the partial-solution worklist and its driver.

``solve_irreducible`` grows partial solutions (C1, S, delta1) breadth-first.
Each popped node spawns a halved copy (S restricted to the half farthest from
C1) and, for every admissible index set, block size k' and weight vector on
the geometric grid, one call of the sampling routine that adds k' centers.
``solve`` runs it on every projection of the family onto a nonempty subset
of [k], repeats each a number of trials and keeps the cheapest completion.

The theoretical sample size and weight grid are astronomically large for
any interesting epsilon, so ``SolverConfig`` caps both; the caps are
reported alongside the theoretical values.
"""

from __future__ import annotations

import math
import time
from collections import deque
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .assign import induced_partition
from .bitcore import CenterSet, Dataset, cost, nearest
from .relations import (
    RelationError,
    RelationFamily,
    complement,
    extend_solution,
    index_sets,
    try_reduce_family,
)
from .sampler import Rng, log2_term, sample_multisets, sample_size_r


@dataclass(frozen=True)
class ParameterSchedule:
    k: int
    k_star: int
    eps: Fraction
    c: float
    delta_prime: Fraction
    alpha: Fraction
    beta: Fraction
    eps_hat: Fraction
    delta_hat: Fraction
    r: int

    def h(self, k_block: int) -> Fraction:
        """Largest cluster-size ratio the weight grid must cover for a block of k_block."""
        return (self.k / self.alpha) ** (k_block - 1)

    def gamma(self, steps: int) -> Fraction:
        return (5**steps - 1) * self.alpha


def schedule(k: int, k_star: int, eps: float, c: float = 2.0) -> ParameterSchedule:
    if k < 1 or k_star < k or eps <= 0:
        raise ValueError(f"need 1 <= k <= k_star and eps > 0 (got k={k}, k_star={k_star}, eps={eps})")
    e = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
    dp = e / (40 * k_star)
    alpha = dp / (5**k - 1)
    beta = (alpha / k) ** (k - 1) * dp / (2 * k * (1 + dp))
    eps_hat = alpha / 7
    return ParameterSchedule(
        k=k,
        k_star=k_star,
        eps=e,
        c=c,
        delta_prime=dp,
        alpha=alpha,
        beta=beta,
        eps_hat=eps_hat,
        delta_hat=alpha / 7,
        r=sample_size_r(k, float(eps_hat), c),
    )


def grid_size(delta: float, h: float) -> int:
    """Number of exponents 0..ceil(log_{1+delta} h)."""
    if delta <= 0 or h < 1:
        raise ValueError("need delta > 0 and h >= 1")
    if h == 1:
        return 1
    top = math.log(h) / math.log1p(delta)
    e = math.ceil(top)
    # guard against log rounding when h is an exact power of (1 + delta)
    if e - top > 1 - 1e-9 and (1 + delta) ** (e - 1) >= h:
        e -= 1
    return e + 1


def grid_exponents(delta: float, h: float, stride: int = 1) -> list[int]:
    top = grid_size(delta, h) - 1
    exps = list(range(0, top + 1, max(1, stride)))
    if exps[-1] != top:
        exps.append(top)
    return exps


def weight_grid(delta: float, h: float, stride: int = 1) -> list[float]:
    return [(1 + delta) ** e for e in grid_exponents(delta, h, stride)]


def halve(X: Dataset, S: np.ndarray, C1: CenterSet) -> np.ndarray:
    """The ceil(|S|/2) members of S farthest from C1; ties resolved by position in S."""
    S = np.asarray(S, dtype=np.intp)
    keep = -(-S.size // 2)
    dist, _ = nearest(X, C1, S)
    order = np.argsort(dist, kind="stable")
    return np.sort(S[order[S.size - keep :]])


def log_success_probability(k_star: int, k: int, eps: float, c_prime: float = 1.0) -> float:
    """Natural log of the per-run success probability of the worklist algorithm."""
    if k < 1 or k_star < k or eps <= 0 or c_prime <= 0:
        raise ValueError("invalid arguments")
    first = k * math.log(eps / (1 + eps))
    base = (
        k * math.log(eps)
        - (k - 1) * math.log(40 * k * k_star * (5**k - 1))
        - math.log(2 * k)
        - math.log(40 * k_star + eps)
    )
    exponent = c_prime * k * k / eps**2 * log2_term(eps)
    return first + exponent * base


def success_probability(k_star: int, k: int, eps: float, c_prime: float = 1.0) -> float:
    return math.exp(log_success_probability(k_star, k, eps, c_prime))


def trials_needed(k_star: int, k: int, eps: float, cap: int, c_prime: float = 1.0) -> int:
    """min(cap, ceil(1/p)) computed without underflow."""
    neg = -log_success_probability(k_star, k, eps, c_prime)
    if neg >= math.log(cap):
        return cap
    return max(1, min(cap, math.ceil(math.exp(neg))))


@dataclass(frozen=True)
class Budget:
    trials: int = 8
    time_ms: float | None = None
    max_nodes: int = 100_000

    def __post_init__(self):
        if self.trials < 1 or self.max_nodes < 1 or (self.time_ms is not None and self.time_ms <= 0):
            raise ValueError("budget values must be positive")


@dataclass(frozen=True)
class SolverConfig:
    """Practical knobs on top of the schedule.

    sample_cap: upper bound on the per-set sample size (None = theoretical r).
    grid_stride: exponent stride on the weight grid; None picks the smallest
        stride giving at most ``max_grid_points`` weights per coordinate.
    enumerate_index_sets: try every index set consistent with C1 instead of
        only the one C1 was built on.
    """

    c: float = 2.0
    c_prime: float = 1.0
    sample_cap: int | None = 2
    grid_stride: int | None = None
    max_grid_points: int = 4
    enumerate_index_sets: bool = True
    workers: int = 1

    def stride_for(self, size: int) -> int:
        if self.grid_stride is not None:
            return self.grid_stride
        if size <= self.max_grid_points:
            return 1
        return -(-(size - 1) // max(1, self.max_grid_points - 1))


@dataclass
class PartialSolution:
    centers: CenterSet
    active: np.ndarray
    slack: Fraction
    steps: int = 0

    def key(self) -> tuple:
        return self.centers.key() + (self.active.tobytes(),)


@dataclass
class Solution:
    centers: CenterSet
    cost: int
    assignment: np.ndarray
    seed: int | None = None
    trial: int | None = None
    index_set: tuple[int, ...] = ()
    mode: str = "randomized"
    trials_used: int = 0
    truncated: bool = False
    meta: dict = field(default_factory=dict)


@dataclass
class RunStats:
    nodes: int = 0
    sampler_calls: int = 0
    truncated: bool = False
    max_slack: Fraction = Fraction(0)
    slack_violations: int = 0


def _empty_centers(m: int) -> CenterSet:
    return CenterSet(np.zeros((0, m), dtype=np.uint8), ())


def _merge_centers(C1: CenterSet, C2: np.ndarray, positions: Sequence[int]) -> CenterSet:
    idx = list(C1.index_set) + list(positions)
    rows = np.concatenate([C1.bits, C2], axis=0)
    order = np.argsort(idx)
    return CenterSet(rows[order], tuple(int(idx[o]) for o in order))


def _group_tables(F: RelationFamily) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    return [(F.coords(g), rel.table, rel.table.astype(np.float64)) for g, rel in enumerate(F.groups)]


def _batched_best(ones: np.ndarray, r: int, weight_rows: np.ndarray, F: RelationFamily, tables) -> np.ndarray:
    """Best-center rows, shape (W, k, m), for W weight vectors sharing one draw.

    ``ones`` holds per-set one-counts of r samples; zeros are r - ones.
    """
    k = F.arity
    W = weight_rows.shape[0]
    out = np.zeros((W, k, F.m), dtype=np.uint8)
    ones = ones.astype(np.float64)
    for coords, table, tab in tables:
        if coords.size == 0:
            continue
        d = ones[:, coords]
        base = weight_rows @ d
        diff = weight_rows[:, :, None] * (r - 2 * d)[None, :, :]
        f = base[:, None, :] + np.einsum("tj,wjc->wtc", tab, diff)
        choice = f.argmin(axis=1)
        out[:, :, coords] = np.transpose(table[choice], (0, 2, 1))
    return out


class _Context:
    """Per-instance caches shared by the trials of one subproblem."""

    def __init__(self, X: Dataset, k: int, F: RelationFamily, sched: ParameterSchedule, config: SolverConfig):
        self.X = X
        self.k = k
        self.F = F
        self.sched = sched
        self.config = config
        r = sched.r if config.sample_cap is None else min(sched.r, config.sample_cap)
        self.r = r
        self.delta_hat = float(sched.delta_hat)
        self._reduced: dict = {}
        self._projected: dict = {}
        self._halved: dict = {}
        self.grids: dict[int, np.ndarray] = {}
        for kb in range(1, k + 1):
            h = float(sched.h(kb))
            size = grid_size(self.delta_hat, h)
            exps = grid_exponents(self.delta_hat, h, config.stride_for(size))
            ws = np.array([(1 + self.delta_hat) ** e for e in exps])
            self.grids[kb] = np.array(list(product(ws, repeat=kb)), dtype=np.float64)
        self.grid_full_sizes = {kb: grid_size(self.delta_hat, float(sched.h(kb))) for kb in range(1, k + 1)}

    def reduced(self, I: tuple[int, ...], C1: CenterSet) -> RelationFamily | None:
        key = (I, C1.bits.tobytes())
        if key not in self._reduced:
            C = CenterSet(C1.bits, I) if I else _empty_centers(C1.dim)
            self._reduced[key] = try_reduce_family(self.F, I, C)
        return self._reduced[key]

    def projected(self, I, C1, Ip) -> RelationFamily | None:
        key = (I, C1.bits.tobytes(), Ip)
        if key not in self._projected:
            Fr = self.reduced(I, C1)
            Fp = None if Fr is None else Fr.project(Ip)
            self._projected[key] = None if Fp is None else (Fp, _group_tables(Fp))
        return self._projected[key]

    def halved(self, node: PartialSolution) -> np.ndarray:
        key = node.key()
        if key not in self._halved:
            self._halved[key] = halve(self.X, node.active, node.centers)
        return self._halved[key]

    def index_choices(self, C1: CenterSet) -> list[tuple[int, ...]]:
        q = C1.size
        if q == 0:
            return [()]
        if not self.config.enumerate_index_sets:
            return [C1.index_set]
        return [I for I in index_sets(self.k, q) if self.reduced(I, C1) is not None]


# both dataclasses are frozen, so shared default instances are safe
DEFAULT_BUDGET = Budget()
DEFAULT_CONFIG = SolverConfig()


def solve_irreducible(
    X: Dataset,
    k: int,
    F: RelationFamily,
    eps: float,
    k_star: int,
    rng: Rng,
    budget: Budget = DEFAULT_BUDGET,
    config: SolverConfig = DEFAULT_CONFIG,
    *,
    context: _Context | None = None,
    deadline: float | None = None,
) -> tuple[CenterSet, int, RunStats]:
    """One run of the worklist algorithm; returns (k centers satisfying F, cost, stats)."""
    if F.arity != k:
        raise ValueError(f"family arity {F.arity} differs from k={k}")
    if any(len(rel) == 0 for rel in F.groups):
        raise RelationError("empty relation in family")
    ctx = context or _Context(X, k, F, schedule(k, k_star, eps, config.c), config)
    sched = ctx.sched
    stats = RunStats()
    if deadline is None and budget.time_ms is not None:
        deadline = time.monotonic() + budget.time_ms / 1000

    root = PartialSolution(_empty_centers(X.dim), np.arange(X.n, dtype=np.intp), Fraction(0))
    work = deque([root])
    seen = {root.key()}
    finished: list[PartialSolution] = []

    def push(node: PartialSolution) -> None:
        key = node.key()
        if key not in seen:
            seen.add(key)
            work.append(node)

    while work:
        if stats.nodes >= budget.max_nodes or (deadline is not None and time.monotonic() > deadline):
            stats.truncated = True
            finished.extend(work)
            break
        node = work.popleft()
        node_id = stats.nodes
        stats.nodes += 1
        C1, S = node.centers, node.active
        if C1.size == k or S.size == 0:
            finished.append(node)
            continue
        if C1.size > 0:
            S_half = ctx.halved(node)
            if S_half.size < S.size:
                push(PartialSolution(C1, S_half, node.slack, node.steps))
        slack = 5 * node.slack + 4 * sched.alpha
        if slack > sched.delta_prime:
            stats.slack_violations += 1
        stats.max_slack = max(stats.max_slack, slack)
        ell = k - C1.size
        node_rng = rng.derive(node_id)
        for I in ctx.index_choices(C1):
            comp = complement(I, k)
            base = CenterSet(C1.bits, I) if I else _empty_centers(X.dim)
            for kb in range(1, ell + 1):
                weights = ctx.grids[kb]
                for Ip in combinations(range(1, ell + 1), kb):
                    projected = ctx.projected(I, C1, Ip)
                    if projected is None:
                        continue
                    Fp, tables = projected
                    stats.sampler_calls += 1
                    # one draw serves the whole weight loop; each call's marginal is unchanged
                    idx = sample_multisets(X, kb, ctx.r, node_rng, S)
                    ones = X.bits[idx].sum(axis=1, dtype=np.int64)
                    positions = [comp[i - 1] for i in Ip]
                    candidates = _batched_best(ones, ctx.r, weights, Fp, tables)
                    flat = candidates.reshape(candidates.shape[0], -1)
                    distinct = {row.tobytes(): i for i, row in enumerate(flat)}
                    for key in sorted(distinct):
                        rows = candidates[distinct[key]]
                        push(PartialSolution(_merge_centers(base, rows, positions), S, slack, node.steps + 1))

    best: tuple[int, CenterSet] | None = None
    evaluated = set()
    for node in finished:
        if node.centers.size == 0:
            continue
        key = node.centers.key()
        if key in evaluated:
            continue
        evaluated.add(key)
        full = extend_solution(X, F, node.centers)
        c = cost(X, full)
        if best is None or c < best[0]:
            best = (c, full)
    if best is None:
        full = extend_solution(X, F, _empty_centers(X.dim))
        best = (cost(X, full) if X.n else 0, full)
    return best[1], best[0], stats


def _subsets(k: int) -> list[tuple[int, ...]]:
    out = []
    for size in range(1, k + 1):
        out.extend(combinations(range(1, k + 1), size))
    return out


@dataclass(frozen=True)
class _Task:
    subset_index: int
    subset: tuple[int, ...]
    trials: int


def _run_subset(X, k, F, eps, seed, budget, config, task: _Task, deadline):
    FI = F.project(task.subset)
    kI = len(task.subset)
    ctx = _Context(X, kI, FI, schedule(kI, k, eps / 4, config.c), config)
    master = Rng(seed)
    results = []
    for t in range(task.trials):
        if deadline is not None and time.monotonic() > deadline and t > 0:
            results.append(None)
            break
        centers, _, stats = solve_irreducible(
            X, kI, FI, eps / 4, k, master.derive(task.subset_index, t), budget, config, context=ctx, deadline=deadline
        )
        partial = CenterSet(centers.bits, task.subset)
        full = extend_solution(X, F, partial)
        results.append((cost(X, full), t, full.bits, stats))
    return task, results


def solve(
    X: Dataset,
    k: int,
    F: RelationFamily,
    eps: float,
    seed: int = 0,
    budget: Budget = DEFAULT_BUDGET,
    config: SolverConfig = DEFAULT_CONFIG,
) -> Solution:
    """Best completion over all nonempty index subsets and trials."""
    if F.arity != k:
        raise ValueError(f"family arity {F.arity} differs from k={k}")
    if X.dim != F.m:
        raise ValueError(f"data dimension {X.dim} differs from family size {F.m}")
    if any(len(rel) == 0 for rel in F.groups):
        raise RelationError("empty relation in family")
    deadline = None if budget.time_ms is None else time.monotonic() + budget.time_ms / 1000
    tasks = [
        _Task(i, I, trials_needed(k, len(I), eps / 4, budget.trials, config.c_prime))
        for i, I in enumerate(_subsets(k))
    ]
    if X.n == 0:
        C = extend_solution(X, F, _empty_centers(X.dim))
        return Solution(C, 0, np.zeros(0, dtype=np.int64), seed, 0, tuple(range(1, k + 1)), trials_used=0)

    args = (X, k, F, eps, seed, budget, config)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_run_subset, *args, task, deadline) for task in tasks]
            outputs = [f.result() for f in futures]
    else:
        outputs = [_run_subset(*args, task, deadline) for task in tasks]

    best = None
    trials_used = 0
    truncated = False
    nodes = 0
    max_slack = Fraction(0)
    violations = 0
    for task, results in outputs:
        for item in results:
            if item is None:
                truncated = True
                continue
            c, t, bits, stats = item
            trials_used += 1
            truncated |= stats.truncated
            nodes += stats.nodes
            max_slack = max(max_slack, stats.max_slack)
            violations += stats.slack_violations
            rank = (c, len(task.subset), task.subset, t)
            if best is None or rank < best[0]:
                best = (rank, bits, task.subset, t)
    rank, bits, subset, t = best
    sched = schedule(k, k, eps / 4, config.c)
    used_r = sched.r if config.sample_cap is None else min(sched.r, config.sample_cap)
    centers = CenterSet(bits, tuple(range(1, k + 1)))
    return Solution(
        centers=centers,
        cost=rank[0],
        assignment=induced_partition(X, centers),
        seed=seed,
        trial=t,
        index_set=subset,
        mode="randomized",
        trials_used=trials_used,
        truncated=truncated,
        meta={
            "nodes": nodes,
            "max_slack": float(max_slack),
            "slack_violations": violations,
            "sample_size": {"theoretical": sched.r, "used": used_r},
            "grid_size": {
                "theoretical": grid_size(float(sched.delta_hat), float(sched.h(k))),
                "cap": config.max_grid_points,
            },
            # true when the budget, not 1/p, set the trial count for some subset
            "trial_cap_applied": any(
                trials_needed(k, len(task.subset), eps / 4, budget.trials + 1, config.c_prime) > budget.trials
                for task in tasks
            ),
        },
    )
