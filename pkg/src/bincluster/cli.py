"""Command-line entry point.

Every command prints one JSON object (CSV for ``lemma-lab``) on stdout.
Exit status: 0 on success, 2 for invalid input, 3 when an exhaustive mode
refuses an instance that exceeds its size guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bitcore import DimensionError
from .exhaustive import ORACLE_LIMIT, PTAS_LIMIT, BudgetExceeded, oracle_opt, ptas
from .formats import (
    InputError,
    emit_csv,
    emit_solution,
    parse_dataset,
    parse_matrix,
    parse_relations,
    read_text,
)
from .lemma_lab import SamplingProblem, random_problem, sampling_experiment, stats_row
from .reductions import (
    FIELDS,
    LowRankInstance,
    best_column_baseline,
    centers_to_matrix,
    kmeans_relation,
    matrix_to_instance,
)
from .relations import Relation, RelationError, RelationFamily, satisfies
from .sampler import Rng
from .solver import Budget, SolverConfig, solve

MODES = ("randomized", "ptas", "oracle")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...]
    k: int | None = None
    epsilon: float = 0.5
    seed: int = 0
    trials: int = 8
    time_budget_ms: float | None = None
    max_nodes: int = 100_000
    mode: str = "randomized"
    c: float = 2.0
    c_prime: float = 1.0
    grid_stride: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.k is not None and self.k < 1:
            raise InputError("--k must be positive", "<args>")
        if self.epsilon <= 0:
            raise InputError("--epsilon must be positive", "<args>")
        if self.trials < 1 or self.max_nodes < 1 or self.workers < 1:
            raise InputError("--trials, --max-nodes and --workers must be positive", "<args>")
        if self.time_budget_ms is not None and self.time_budget_ms <= 0:
            raise InputError("--time-budget-ms must be positive", "<args>")
        if self.mode not in MODES:
            raise InputError(f"--mode must be one of {MODES}", "<args>")
        if self.c <= 0 or self.c_prime <= 0:
            raise InputError("--c and --c-prime must be positive", "<args>")
        if self.grid_stride is not None and self.grid_stride < 1:
            raise InputError("--grid-stride must be positive", "<args>")

    @property
    def budget(self) -> Budget:
        return Budget(trials=self.trials, time_ms=self.time_budget_ms, max_nodes=self.max_nodes)

    @property
    def solver_config(self) -> SolverConfig:
        return SolverConfig(c=self.c, c_prime=self.c_prime, grid_stride=self.grid_stride, workers=self.workers)


def _run_mode(cfg: RunConfig, X, k: int, F: RelationFamily):
    if cfg.mode == "oracle":
        return oracle_opt(X, k, F, ORACLE_LIMIT)
    if cfg.mode == "ptas":
        return ptas(X, k, F, cfg.epsilon, cfg.c, PTAS_LIMIT)
    return solve(X, k, F, cfg.epsilon, cfg.seed, cfg.budget, cfg.solver_config)


def _arity(cfg: RunConfig, F: RelationFamily) -> int:
    if cfg.k is not None and cfg.k != F.arity:
        raise InputError(f"--k={cfg.k} differs from the relation arity {F.arity}", "<args>")
    return F.arity


def _with_seed(sol, cfg: RunConfig):
    if sol.seed is None:
        sol.seed = cfg.seed
    return sol


def cmd_solve(cfg: RunConfig) -> str:
    X = parse_dataset(cfg.inputs[0])
    F = parse_relations(cfg.inputs[1], X.dim)
    k = _arity(cfg, F)
    sol = _with_seed(_run_mode(cfg, X, k, F), cfg)
    assert satisfies(sol.centers, F)
    return emit_solution(sol)


def cmd_kmeans(cfg: RunConfig) -> str:
    if cfg.k is None:
        raise InputError("kmeans needs --k", "<args>")
    X = parse_dataset(cfg.inputs[0])
    F = RelationFamily.shared(X.dim, kmeans_relation(cfg.k))
    return emit_solution(_with_seed(_run_mode(cfg, X, cfg.k, F), cfg))


def cmd_lowrank(cfg: RunConfig, rank: int, field: str) -> str:
    A = parse_matrix(cfg.inputs[0])
    try:
        inst = LowRankInstance(A, rank, field)
    except (ValueError, RelationError) as exc:
        raise InputError(str(exc), "<args>") from exc
    X, k, F = matrix_to_instance(inst)
    sol = _with_seed(_run_mode(cfg, X, k, F), cfg)
    B, value = centers_to_matrix(A, sol.centers, F, rank, field)
    assert value == sol.cost
    return emit_solution(sol, matrix=B.to_strings(), rank=rank, field=field)


def cmd_baseline(cfg: RunConfig) -> str:
    A = parse_matrix(cfg.inputs[0])
    B, value = best_column_baseline(A)
    return json.dumps({"cost": value, "matrix": B.to_strings(), "mode": "baseline"}, separators=(", ", ": "))


def _problem_from_config(entry: dict, defaults: dict) -> SamplingProblem:
    rows = entry["relation"]
    R = Relation.from_strings(rows)
    eps = float(entry.get("eps", defaults.get("eps", 0.3)))
    if "r" in entry:
        return SamplingProblem(R, tuple(map(float, entry["p"])), tuple(map(float, entry["w"])), eps, int(entry["r"]))
    return SamplingProblem.with_formula(R, entry["p"], entry["w"], eps, float(entry.get("c", defaults.get("c", 2.0))))


def cmd_lemma_lab(config_path: str, seed_override: int | None) -> str:
    """Config keys: trials, seed, eps, c and either ``problems`` (explicit) or ``random`` (a count)."""
    try:
        conf = json.loads(read_text(config_path))
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg}", config_path, exc.lineno, exc.colno) from exc
    if not isinstance(conf, dict):
        raise InputError("config must be a JSON object", config_path)
    try:
        seed = int(conf.get("seed", 0) if seed_override is None else seed_override)
        T = int(conf.get("trials", 20000))
        cs = conf.get("c_values", [conf.get("c", 2.0)])
        rows = []
        for c in cs:
            defaults = {**conf, "c": c}
            if "problems" in conf:
                probs = [_problem_from_config(e, defaults) for e in conf["problems"]]
            else:
                gen = np.random.default_rng(seed)
                probs = [
                    random_problem(gen, float(conf.get("eps", 0.3)), float(c), int(conf.get("max_k", 4)))
                    for _ in range(int(conf.get("random", 20)))
                ]
            for i, prob in enumerate(probs):
                st = sampling_experiment(prob, T, Rng(seed, (i,)))
                rows.append(stats_row(i, prob, st, c=float(c)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad lemma-lab config: {exc}", config_path) from exc
    return emit_csv(rows)


def _add_solver_flags(p: argparse.ArgumentParser, modes: bool = True) -> None:
    p.add_argument("--k", type=int)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=8)
    p.add_argument("--time-budget-ms", type=float)
    p.add_argument("--max-nodes", type=int, default=100_000)
    p.add_argument("--c", type=float, default=2.0, help="sample size constant")
    p.add_argument("--c-prime", type=float, default=1.0, help="constant in the success-probability exponent")
    p.add_argument("--grid-stride", type=int)
    p.add_argument("--workers", type=int, default=1)
    if modes:
        p.add_argument("--mode", choices=MODES, default="randomized")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bincluster", description="Binary clustering under per-coordinate relations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="cluster a dataset under a relation file")
    p.add_argument("dataset")
    p.add_argument("relations")
    _add_solver_flags(p)

    p = sub.add_parser("kmeans", help="binary k-means (every k-tuple allowed)")
    p.add_argument("dataset")
    _add_solver_flags(p)

    p = sub.add_parser("lowrank", help="rank-r binary matrix approximation")
    p.add_argument("matrix")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--field", choices=FIELDS, default="gf2")
    _add_solver_flags(p)

    p = sub.add_parser("baseline", help="rank-1 best-column approximation")
    p.add_argument("matrix")

    for name, hint in (("oracle", "exact optimum by enumerating assignments"), ("ptas", "exhaustive sample search")):
        p = sub.add_parser(name, help=hint)
        p.add_argument("dataset")
        p.add_argument("relations")
        _add_solver_flags(p, modes=False)

    p = sub.add_parser("lemma-lab", help="sampling-estimate statistics from a JSON config, as CSV")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    return parser


def _config(args: argparse.Namespace, inputs: tuple[str, ...], mode: str | None = None) -> RunConfig:
    return RunConfig(
        command=args.command,
        inputs=inputs,
        k=args.k,
        epsilon=args.epsilon,
        seed=args.seed,
        trials=args.trials,
        time_budget_ms=args.time_budget_ms,
        max_nodes=args.max_nodes,
        mode=mode or getattr(args, "mode", "randomized"),
        c=args.c,
        c_prime=args.c_prime,
        grid_stride=args.grid_stride,
        workers=args.workers,
    )


def run(argv: list[str] | None = None) -> str:
    args = build_parser().parse_args(argv)
    cmd = args.command
    if cmd == "solve":
        return cmd_solve(_config(args, (args.dataset, args.relations)))
    if cmd in ("oracle", "ptas"):
        return cmd_solve(_config(args, (args.dataset, args.relations), mode=cmd))
    if cmd == "kmeans":
        return cmd_kmeans(_config(args, (args.dataset,)))
    if cmd == "lowrank":
        return cmd_lowrank(_config(args, (args.matrix,)), args.rank, args.field)
    if cmd == "baseline":
        return cmd_baseline(RunConfig(command=cmd, inputs=(args.matrix,)))
    out = cmd_lemma_lab(args.config, args.seed)
    if args.output:
        Path(args.output).write_text(out)
        return ""
    return out


def main(argv: list[str] | None = None) -> int:
    try:
        out = run(argv)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, RelationError, DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if out:
        sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
