"""Rank-r approximation of a planted low-rank matrix with flipped entries."""

import argparse

import numpy as np

from bincluster.reductions import (
    BinaryMatrix,
    LowRankInstance,
    best_column_baseline,
    centers_to_matrix,
    matrix_to_instance,
)
from bincluster.solver import Budget, solve


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=30)
    ap.add_argument("--cols", type=int, default=200)
    ap.add_argument("--rank", type=int, default=2)
    ap.add_argument("--field", choices=["gf2", "boolean"], default="gf2")
    ap.add_argument("--noise", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=4)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    U = rng.integers(0, 2, (args.rows, args.rank))
    V = rng.integers(0, 2, (args.rank, args.cols))
    planted = (U @ V) % 2 if args.field == "gf2" else (U @ V > 0).astype(int)
    flips = rng.random(planted.shape) < args.noise
    A = BinaryMatrix((planted ^ flips).astype(np.uint8))

    X, k, F = matrix_to_instance(LowRankInstance(A, args.rank, args.field))
    sol = solve(X, k, F, 0.5, seed=args.seed, budget=Budget(trials=args.trials))
    _, value = centers_to_matrix(A, sol.centers, F, args.rank, args.field)
    print(f"flipped entries (planted solution cost): {int(flips.sum())}")
    print(f"rank-{args.rank} {args.field} solution cost: {value}")
    print(f"rank-1 best-column baseline cost: {best_column_baseline(A)[1]}")


if __name__ == "__main__":
    main()
