"""Binary clustering with per-coordinate relations on the centers."""

from .assign import best_centers, induced_partition, partition_optimal_centers
from .bitcore import (
    BinaryVector,
    CenterSet,
    CoordCounts,
    Dataset,
    coord_counts,
    cost,
    hamming,
)
from .exhaustive import BudgetExceeded, oracle_opt, ptas
from .relations import (
    Relation,
    RelationFamily,
    extend_solution,
    reduce_family,
    satisfies,
)
from .sampler import Rng, algorithm_a, sample_size_r
from .solver import Budget, Solution, SolverConfig, solve, solve_irreducible

__all__ = [
    "BinaryVector",
    "Budget",
    "BudgetExceeded",
    "CenterSet",
    "CoordCounts",
    "Dataset",
    "Relation",
    "RelationFamily",
    "Rng",
    "Solution",
    "SolverConfig",
    "algorithm_a",
    "best_centers",
    "coord_counts",
    "cost",
    "extend_solution",
    "hamming",
    "induced_partition",
    "oracle_opt",
    "partition_optimal_centers",
    "ptas",
    "reduce_family",
    "sample_size_r",
    "satisfies",
    "solve",
    "solve_irreducible",
]
