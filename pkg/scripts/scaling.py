"""Wall time of the randomized solver as n grows at fixed k, eps and trials."""

import argparse
import time

import numpy as np

from bincluster.bitcore import Dataset
from bincluster.relations import Relation, RelationFamily
from bincluster.solver import Budget, solve


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[10_000, 20_000, 40_000, 80_000])
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--epsilon", type=float, default=1.0)
    ap.add_argument("--trials", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    F = RelationFamily.shared(args.dim, Relation.full(args.k))
    prev = None
    print("n,median_seconds,ratio,cost")
    for n in args.sizes:
        X = Dataset(np.random.default_rng(n).integers(0, 2, (n, args.dim), dtype=np.uint8))
        runs = []
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            sol = solve(X, args.k, F, args.epsilon, seed=0, budget=Budget(trials=args.trials))
            runs.append(time.perf_counter() - t0)
        t = float(np.median(runs))
        ratio = "" if prev is None else f"{t / prev:.2f}"
        print(f"{n},{t:.4f},{ratio},{sol.cost}")
        prev = t


if __name__ == "__main__":
    main()
