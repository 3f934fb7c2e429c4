from itertools import product

import numpy as np
import pytest
from conftest import instances
from hypothesis import given, settings
from hypothesis import strategies as st

from bincluster.bitcore import CenterSet, Dataset, cost
from bincluster.exhaustive import (
    BudgetExceeded,
    compositions,
    oracle_opt,
    ptas,
    ptas_space_size,
)
from bincluster.relations import Relation, RelationFamily, satisfies

TINY = Dataset.from_strings(["00", "01", "11"])


def brute_force_over_centers(X, k, F):
    """Minimum cost over every center set satisfying F (independent of the oracle)."""
    tables = [F.relation(i).table for i in range(F.m)]
    best = None
    for choice in product(*(range(len(t)) for t in tables)):
        C = CenterSet(np.stack([tables[i][c] for i, c in enumerate(choice)], axis=1))
        val = cost(X, C)
        best = val if best is None else min(best, val)
    return best


def test_oracle_examples():
    assert oracle_opt(TINY, 2, RelationFamily.shared(2, Relation.full(2))).cost == 1
    forced = oracle_opt(TINY, 2, RelationFamily.shared(2, Relation.from_strings(["01"])))
    assert forced.cost == 1 and forced.centers.to_strings() == ["00", "11"]
    X = Dataset.from_strings(["010", "111", "001"])
    assert oracle_opt(X, 3, RelationFamily.shared(3, Relation.full(3))).cost == 0
    assert oracle_opt(X, 4, RelationFamily.shared(3, Relation.full(4))).cost == 0


def test_oracle_guard():
    X = Dataset(np.zeros((12, 2), dtype=np.uint8))
    with pytest.raises(BudgetExceeded):
        oracle_opt(X, 4, RelationFamily.shared(2, Relation.full(4)), limit=10**6)


def test_ptas_examples():
    X = Dataset.from_strings(["00", "11"])
    assert ptas(X, 2, RelationFamily.shared(2, Relation.full(2)), 1.0).cost == 0
    F = RelationFamily.per_coordinate([Relation.from_strings(["10"]), Relation.from_strings(["01"])])
    sol = ptas(TINY, 2, F, 1.0)
    assert sol.centers.to_strings() == ["10", "01"]
    assert ptas(TINY, 2, RelationFamily.shared(2, Relation.full(2)), 0.5).cost == 1


def test_ptas_guard():
    X = Dataset(np.zeros((8, 2), dtype=np.uint8))
    with pytest.raises(BudgetExceeded):
        ptas(X, 3, RelationFamily.shared(2, Relation.full(3)), 0.5, limit=10**6)


def test_compositions_and_space():
    comps = list(compositions(3, 2))
    assert comps == [(0, 3), (1, 2), (2, 1), (3, 0)]
    assert len(list(compositions(5, 3))) == 21
    # n=2, k=2, r=1: two multisets; compositions (0,2), (1,1), (2,0)
    assert ptas_space_size(2, 2, 1) == 2 + 4 + 2


@settings(max_examples=40)
@given(instances(max_n=5, max_m=3, max_k=3))
def test_oracle_matches_center_enumeration(inst):
    X, k, F = inst
    sol = oracle_opt(X, k, F)
    assert satisfies(sol.centers, F)
    assert sol.cost == cost(X, sol.centers) == brute_force_over_centers(X, k, F)


@settings(max_examples=30)
@given(instances(max_n=5, max_m=4, max_k=2))
def test_ptas_within_guarantee(inst):
    X, k, F = inst
    opt = oracle_opt(X, k, F).cost
    sol = ptas(X, k, F, 1.0, c=1.0)
    assert satisfies(sol.centers, F)
    assert opt <= sol.cost <= 2 * opt


@settings(max_examples=30)
@given(instances(max_n=6, max_m=4, max_k=3), st.integers(0, 2**32 - 1))
def test_oracle_permutation_invariance(inst, seed):
    X, k, F = inst
    rng = np.random.default_rng(seed)
    rows = rng.permutation(X.n)
    cols = rng.permutation(X.dim)
    Xp = Dataset(X.bits[rows][:, cols])
    Fp = RelationFamily.per_coordinate([F.relation(i) for i in cols])
    assert oracle_opt(Xp, k, Fp).cost == oracle_opt(X, k, F).cost
