"""Pass rates of the sampling estimate for several sample-size constants c."""

import argparse
import sys
from collections import defaultdict

from bincluster.formats import emit_csv
from bincluster.lemma_lab import c_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=4)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--epsilon", type=float, default=0.3)
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--c", type=float, nargs="+", default=[1.0, 2.0, 4.0])
    args = ap.parse_args()

    rows = c_sweep(args.seed, args.count, args.epsilon, args.trials, args.c)
    sys.stdout.write(emit_csv(rows))
    passed = defaultdict(int)
    for row in rows:
        passed[row["c"]] += row["passed"]
    for c, p in passed.items():
        print(f"# c={c}: {p}/{args.count} passed", file=sys.stderr)


if __name__ == "__main__":
    main()
