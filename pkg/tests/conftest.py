import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from bincluster.bitcore import CenterSet, Dataset
from bincluster.relations import Relation, RelationFamily

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def bit_matrices(draw, min_rows=0, max_rows=8, min_cols=1, max_cols=70, cols=None):
    n = draw(st.integers(min_rows, max_rows))
    m = cols if cols is not None else draw(st.integers(min_cols, max_cols))
    seed = draw(st.integers(0, 2**32 - 1))
    return np.random.default_rng(seed).integers(0, 2, size=(n, m), dtype=np.uint8)


@st.composite
def relations(draw, k=None, max_k=4):
    k = k if k is not None else draw(st.integers(1, max_k))
    masks = draw(st.sets(st.integers(0, 2**k - 1), min_size=1))
    return Relation(k, masks)


@st.composite
def instances(draw, max_n=6, max_m=5, max_k=3, per_coordinate=False):
    """(X, k, F) with a random shared or per-coordinate family."""
    k = draw(st.integers(1, max_k))
    m = draw(st.integers(1, max_m))
    X = Dataset(draw(bit_matrices(min_rows=1, max_rows=max_n, cols=m)))
    if per_coordinate or draw(st.booleans()):
        F = RelationFamily.per_coordinate([draw(relations(k=k)) for _ in range(m)])
    else:
        F = RelationFamily.shared(m, draw(relations(k=k)))
    return X, k, F


def random_satisfying_centers(rng, F):
    """A uniformly chosen tuple per coordinate, assembled into a CenterSet."""
    k = F.arity
    bits = np.zeros((k, F.m), dtype=np.uint8)
    for i in range(F.m):
        tab = F.relation(i).table
        bits[:, i] = tab[rng.integers(len(tab))]
    return CenterSet(bits)


@pytest.fixture
def tiny():
    return Dataset.from_strings(["00", "01", "11"])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
