from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bincluster.bitcore import CenterSet, cost
from bincluster.exhaustive import oracle_opt
from bincluster.reductions import (
    BinaryMatrix,
    LowRankInstance,
    best_column_baseline,
    bicluster_relation,
    boolean_relation,
    centers_to_matrix,
    exhaustive_rank1,
    gf2_rank,
    gf2_relation,
    kmeans_relation,
    matrix_to_instance,
    rank_basis_centers,
)
from bincluster.relations import Relation, RelationError, RelationFamily

R = Relation.from_strings


def rand_matrix(seed, m=6, n=6):
    return BinaryMatrix(np.random.default_rng(seed).integers(0, 2, (m, n), dtype=np.uint8))


def test_gf2_relation_examples():
    assert gf2_relation(1) == R(["00", "01"])
    assert gf2_relation(2) == R(["0000", "0101", "0011", "0110"])
    assert all(t[0] == 0 for t in gf2_relation(3))


def test_boolean_relation_examples():
    assert boolean_relation(1) == R(["00", "01"])
    assert boolean_relation(2) == R(["0000", "0101", "0011", "0111"])


def test_relation_cap():
    with pytest.raises(RelationError):
        gf2_relation(5)
    with pytest.raises(ValueError):
        boolean_relation(0)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_gf2_closed_under_xor_and_boolean_under_or(r):
    g = set(gf2_relation(r))
    assert len(g) == 2**r
    assert all(tuple(a ^ b for a, b in zip(s, t)) in g for s in g for t in g)
    b = set(boolean_relation(r))
    assert all(tuple(x | y for x, y in zip(s, t)) in b for s in b for t in b)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_boolean_relation_monotone(r):
    lam = list(product((0, 1), repeat=r))

    def row(x):
        return tuple(int(any(a and b for a, b in zip(x, g))) for g in lam)

    for x in lam:
        for y in lam:
            if all(a <= b for a, b in zip(x, y)):
                assert all(a <= b for a, b in zip(row(x), row(y)))


def test_kmeans_and_bicluster_relations():
    assert kmeans_relation(2) == R(["00", "01", "10", "11"])
    assert kmeans_relation(1) == R(["0", "1"])
    assert len(kmeans_relation(5)) == 32
    assert bicluster_relation(2) == R(["10", "01"])
    assert len(bicluster_relation(3)) == 3


def test_matrix_to_instance_identity():
    A = BinaryMatrix(np.eye(2, dtype=np.uint8))
    X, k, F = matrix_to_instance(LowRankInstance(A, 1, "gf2"))
    assert X.to_strings() == ["10", "01"] and k == 2
    assert F.is_shared and F.relation(0) == R(["00", "01"])


def test_zero_matrix_has_zero_optimum():
    A = BinaryMatrix(np.zeros((3, 4), dtype=np.uint8))
    X, k, F = matrix_to_instance(LowRankInstance(A, 2, "boolean"))
    assert X.n == 4 and oracle_opt(X, k, F).cost == 0


def test_centers_to_matrix_example():
    A = BinaryMatrix(np.eye(2, dtype=np.uint8))
    B, value = centers_to_matrix(A, CenterSet.from_strings(["00", "10"]))
    assert B.entries.tolist() == [[1, 0], [0, 0]] and value == 1
    A = rand_matrix(3)
    B, value = centers_to_matrix(A, CenterSet(A.entries.T.copy()))
    assert value == 0 and B == A


def test_centers_to_matrix_rejects_unsatisfied():
    A = BinaryMatrix(np.eye(2, dtype=np.uint8))
    F = RelationFamily.shared(2, gf2_relation(1))
    with pytest.raises(RelationError):
        centers_to_matrix(A, CenterSet.from_strings(["10", "00"]), F)


def test_baseline_examples():
    assert best_column_baseline(BinaryMatrix([[1, 1], [1, 0]]))[1] == 1
    u, v = np.array([1, 0, 1]), np.array([1, 1, 0, 1])
    assert best_column_baseline(BinaryMatrix(np.outer(u, v)))[1] == 0
    B, value = best_column_baseline(BinaryMatrix(np.zeros((2, 3), dtype=np.uint8)))
    assert value == 0 and not B.entries.any()


def test_gf2_rank():
    assert gf2_rank(np.eye(4, dtype=np.uint8)) == 4
    assert gf2_rank(np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])) == 2
    assert gf2_rank(np.zeros((3, 3), dtype=np.uint8)) == 0


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2]), st.sampled_from(["gf2", "boolean"]))
def test_cost_equivalence(seed, r, field):
    rng = np.random.default_rng(seed)
    A = rand_matrix(seed)
    X, _k, F = matrix_to_instance(LowRankInstance(A, r, field))
    # (a) any satisfying center set gives a matrix no worse than its clustering cost
    basis = rng.integers(0, 2, (r, 6))
    C = rank_basis_centers(basis, field)
    B, value = centers_to_matrix(A, C, F, r, field)
    assert value == cost(X, C)
    # (b) a rank-r product U V is matched by the combinations of U's columns
    V = rng.integers(0, 2, (r, 6))
    prod = (basis.T @ V) % 2 if field == "gf2" else (basis.T @ V > 0).astype(int)
    direct = int((A.entries != prod).sum())
    assert cost(X, rank_basis_centers(basis, field)) <= direct
    if field == "gf2":
        assert gf2_rank(B.entries.T) <= r


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["gf2", "boolean"]))
def test_reduced_oracle_equals_rank1_optimum(seed, field):
    A = rand_matrix(seed)
    X, k, F = matrix_to_instance(LowRankInstance(A, 1, field))
    assert oracle_opt(X, k, F).cost == exhaustive_rank1(A)[1]


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_baseline_within_twice_optimum(seed):
    A = rand_matrix(seed)
    _, opt = exhaustive_rank1(A)
    B, value = best_column_baseline(A)
    assert opt <= value <= 2 * opt
    assert value == int((A.entries != B.entries).sum())
