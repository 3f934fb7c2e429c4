"""Compare ptas and the randomized solver with the exact optimum on random small instances.

Writes one CSV row per instance to stdout.
"""

import argparse
import csv
import math
import sys
import time

from bincluster.exhaustive import oracle_opt, ptas
from bincluster.instances import oracle_suite
from bincluster.solver import Budget, solve


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--ptas-epsilon", type=float, default=1.0)
    ap.add_argument("--ptas-c", type=float, default=1.0)
    args = ap.parse_args()

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["instance", "n", "m", "k", "relation_size", "opt", "ptas", "randomized", "ratio", "seconds"])
    hits = 0
    for i, inst in enumerate(oracle_suite(args.seed, args.count)):
        opt = oracle_opt(inst.X, inst.k, inst.F).cost
        p = ptas(inst.X, inst.k, inst.F, args.ptas_epsilon, c=args.ptas_c).cost
        t0 = time.perf_counter()
        sol = solve(inst.X, inst.k, inst.F, args.epsilon, seed=i, budget=Budget(trials=args.trials))
        dt = time.perf_counter() - t0
        hits += sol.cost <= math.ceil((1 + args.epsilon) * opt)
        ratio = sol.cost / opt if opt else float(sol.cost == 0)
        size = len(inst.F.groups[0])
        out.writerow([i, inst.X.n, inst.X.dim, inst.k, size, opt, p, sol.cost, f"{ratio:.3f}", f"{dt:.2f}"])
    print(f"# randomized within ceil((1+eps)*OPT): {hits}/{args.count}", file=sys.stderr)


if __name__ == "__main__":
    main()
