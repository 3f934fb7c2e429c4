from itertools import combinations, product

import numpy as np
import pytest
from conftest import instances, relations
from hypothesis import given
from hypothesis import strategies as st

from bincluster.bitcore import CenterSet, Dataset, cost
from bincluster.relations import (
    Relation,
    RelationError,
    RelationFamily,
    complement,
    extend_solution,
    mask_to_tuple,
    merge,
    reduce_family,
    satisfies,
    tuple_to_mask,
)

R = Relation.from_strings


def test_canonical_order_is_lexicographic():
    rel = R(["11", "00", "10", "01", "00"])
    assert rel.to_strings() == ["00", "01", "10", "11"]
    assert tuple_to_mask((1, 0, 0)) == 4 and mask_to_tuple(4, 3) == (1, 0, 0)


def test_satisfies_worked_example():
    # c1 = (0,1), c2 = (0,0), c3 = (1,1) over two coordinates
    C = CenterSet.from_strings(["01", "00", "11"])
    F = RelationFamily.per_coordinate([R(["001", "100"]), R(["111", "101", "001"])])
    assert satisfies(C, F)


def test_satisfies_simple_cases():
    C = CenterSet.from_strings(["1", "1"])
    assert not satisfies(C, RelationFamily.shared(1, R(["01"])))
    assert satisfies(C, RelationFamily.shared(1, Relation.full(2)))
    with pytest.raises(RelationError):
        satisfies(CenterSet.from_strings(["1"]), RelationFamily.shared(1, R(["01"])))


def test_project_examples():
    assert R(["001", "100"]).project((1, 3)) == R(["01", "10"])
    rel = R(["001", "100", "111"])
    assert rel.project((1, 2, 3)) == rel
    assert R(["01", "11"]).project((2,)) == R(["1"])
    with pytest.raises(RelationError):
        rel.project((0,))
    with pytest.raises(RelationError):
        rel.project((4,))


def test_restrict_examples():
    rel = R(["001", "100", "111"])
    assert rel.restrict((1,), (1,)) == R(["100", "111"])
    assert rel.restrict((1, 2, 3), (1, 1, 1)) == R(["111"])
    assert R(["01"]).restrict((2,), (1,)) == R(["01"])
    with pytest.raises(RelationError):
        R(["01"]).restrict((1,), (1,))


def test_reduce_examples():
    rel = R(["001", "100", "111"])
    assert rel.reduce((1,), (1,)) == R(["00", "11"])
    full = rel.reduce((1, 2, 3), (0, 0, 1))
    assert full.arity == 0 and len(full) == 1
    assert R(["01", "10"]).reduce((1,), (0,)) == R(["1"])


def test_reduce_family_examples():
    C = CenterSet.from_strings(["0110"])
    Fr = reduce_family(RelationFamily.shared(4, Relation.full(3)), (2,), CenterSet(C.bits, (2,)))
    assert Fr.is_shared and Fr.relation(0) == Relation.full(2)
    Fr = reduce_family(RelationFamily.shared(3, R(["00", "01"])), (1,), CenterSet.from_strings(["000"]))
    assert Fr.is_shared and Fr.relation(0) == R(["0", "1"])
    F1 = RelationFamily.per_coordinate([R(["001", "100", "111"])])
    Fr = reduce_family(F1, (1,), CenterSet.from_strings(["1"]))
    assert Fr.m == 1 and Fr.relation(0) == R(["001", "100", "111"]).reduce((1,), (1,))


def test_reduce_family_goes_per_coordinate_when_patterns_differ():
    F = RelationFamily.shared(2, R(["00", "11"]))
    Fr = reduce_family(F, (1,), CenterSet.from_strings(["01"]))
    assert not Fr.is_shared
    assert Fr.relation(0) == R(["0"]) and Fr.relation(1) == R(["1"])


def test_reduce_family_rejects_unsatisfied():
    F = RelationFamily.shared(1, R(["00"]))
    with pytest.raises(RelationError):
        reduce_family(F, (1,), CenterSet.from_strings(["1"]))


def test_extend_solution_examples():
    X = Dataset.from_strings(["0", "1"])
    F = RelationFamily.shared(1, R(["01", "11"]))
    C = extend_solution(X, F, CenterSet.from_strings(["0"], (1,)))
    assert C.to_strings() == ["0", "1"]

    full_C = CenterSet.from_strings(["0", "1"])
    assert extend_solution(X, F, full_C) is full_C

    X3 = Dataset.from_strings(["101", "111"])
    C = extend_solution(X3, RelationFamily.shared(3, Relation.full(3)), CenterSet.from_strings(["101"], (2,)))
    assert C.to_strings() == ["000", "101", "000"]


def test_relation_validation():
    with pytest.raises(RelationError):
        Relation(2, [4])
    with pytest.raises(RelationError):
        Relation(17, [])
    with pytest.raises(RelationError):
        RelationFamily(2, [R(["0"]), R(["00"])], np.array([0, 1]))


@given(relations(max_k=6), st.data())
def test_merge_property(rel, data):
    k = rel.arity
    size = data.draw(st.integers(0, k))
    I = data.draw(st.sampled_from(list(combinations(range(1, k + 1), size))))
    members = set(rel)
    for u_t in rel.project(I):
        u = tuple_to_mask(u_t)
        merged = set()
        for v_t in rel.reduce(I, u):
            t = merge(u, tuple_to_mask(v_t), I, k)
            assert mask_to_tuple(t, k) in members
            merged.add(t)
        assert merged == {tuple_to_mask(t) for t in rel.restrict(I, u)}


@given(relations(max_k=5), st.data())
def test_projection_composes(rel, data):
    k = rel.arity
    I = data.draw(st.sets(st.integers(1, k), min_size=0).map(lambda s: tuple(sorted(s))))
    J = data.draw(st.sets(st.integers(1, max(1, len(I))), max_size=len(I)).map(lambda s: tuple(sorted(s))))
    composed = tuple(I[j - 1] for j in J)
    assert rel.project(I).project(J) == rel.project(composed)


@given(instances(), st.integers(0, 2**32 - 1))
def test_satisfies_matches_naive_loop(inst, seed):
    _X, k, F = inst
    C = CenterSet(np.random.default_rng(seed).integers(0, 2, size=(k, F.m), dtype=np.uint8))
    naive = all(tuple(int(b) for b in C.bits[:, i]) in set(F.relation(i)) for i in range(F.m))
    assert satisfies(C, F) == naive


@given(instances(max_k=4), st.data())
def test_extend_solution_satisfies_and_never_costs_more(inst, data):
    X, k, F = inst
    size = data.draw(st.integers(1, k))
    I = data.draw(st.sampled_from(list(combinations(range(1, k + 1), size))))
    proj = F.project(I)
    # a random partial solution drawn from the projected relations
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    bits = np.zeros((size, F.m), dtype=np.uint8)
    for i in range(F.m):
        tab = proj.relation(i).table
        bits[:, i] = tab[rng.integers(len(tab))]
    partial = CenterSet(bits, I)
    full = extend_solution(X, F, partial)
    assert satisfies(full, F)
    assert all((full.bits[p - 1] == row).all() for p, row in zip(I, bits))
    assert cost(X, full) <= cost(X, CenterSet(bits))


def test_complement():
    assert complement((1, 3), 4) == (2, 4)
    assert complement((), 2) == (1, 2)


@given(relations(max_k=4))
def test_iteration_round_trip(rel):
    assert Relation.from_tuples(list(rel), rel.arity) == rel
    assert all(t in rel for t in rel)
    assert sorted(rel.masks.tolist()) == rel.masks.tolist()
    assert len(set(rel)) == len(rel) <= 2**rel.arity
    assert {tuple(r) for r in rel.table.tolist()} == set(rel)
    assert set(product((0, 1), repeat=rel.arity)) >= set(rel)
