"""Low-rank matrix approximation, k-means and bicluster editing as constrained clustering.

A rank-r factorization B = U V over GF(2) (or the Boolean semiring) makes
every column of B one of the 2^r combinations U lambda, lambda in {0,1}^r.
Taking these k = 2^r combinations as centers, coordinate i of the centers
reads (x . lambda_1, ..., x . lambda_k) with x the i-th row of U, a tuple of
a relation that does not depend on U. Clustering the columns of A under that
relation is therefore the same problem.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .bitcore import CenterSet, Dataset, cost, nearest
from .relations import MAX_ARITY, Relation, RelationError, RelationFamily, satisfies

FIELDS = ("gf2", "boolean")


class BinaryMatrix:
    """An m x n 0/1 matrix; its n columns are the points being clustered."""

    def __init__(self, entries: np.ndarray):
        entries = np.asarray(entries, dtype=np.uint8)
        if entries.ndim != 2 or 0 in entries.shape:
            raise ValueError("matrix must be 2-D with positive dimensions")
        if entries.max() > 1:
            raise ValueError("entries must be 0 or 1")
        self.entries = entries
        self.entries.setflags(write=False)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def columns(self) -> Dataset:
        return Dataset(self.entries.T.copy())

    @classmethod
    def from_columns(cls, X: Dataset | np.ndarray) -> BinaryMatrix:
        bits = X.bits if isinstance(X, Dataset) else np.asarray(X, dtype=np.uint8)
        return cls(bits.T.copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    def to_strings(self) -> list[str]:
        return ["".join("1" if b else "0" for b in row) for row in self.entries]


@dataclass(frozen=True)
class LowRankInstance:
    A: BinaryMatrix
    rank: int
    field: str = "gf2"

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be at least 1")
        if 2**self.rank > MAX_ARITY:
            raise RelationError(f"2^{self.rank} centers exceeds the arity cap {MAX_ARITY}")
        if self.field not in FIELDS:
            raise ValueError(f"field must be one of {FIELDS}")


def _generators(r: int) -> np.ndarray:
    if r < 1:
        raise ValueError("rank must be at least 1")
    if 2**r > MAX_ARITY:
        raise RelationError(f"2^{r} centers exceeds the arity cap {MAX_ARITY}")
    return np.array(list(product((0, 1), repeat=r)), dtype=np.int64)  # lexicographic


def gf2_relation(r: int) -> Relation:
    lam = _generators(r)
    tuples = (lam @ lam.T) % 2  # row x: (x . lambda_j mod 2)_j
    return Relation.from_tuples(tuples.tolist(), 2**r)


def boolean_relation(r: int) -> Relation:
    lam = _generators(r)
    tuples = (lam @ lam.T > 0).astype(np.int64)
    return Relation.from_tuples({tuple(t) for t in tuples.tolist()}, 2**r)


def kmeans_relation(k: int) -> Relation:
    return Relation.full(k)


def bicluster_relation(k: int) -> Relation:
    return Relation.from_tuples(np.eye(k, dtype=np.int64).tolist(), k)


def field_relation(r: int, field: str) -> Relation:
    if field == "gf2":
        return gf2_relation(r)
    if field == "boolean":
        return boolean_relation(r)
    raise ValueError(f"field must be one of {FIELDS}")


def matrix_to_instance(inst: LowRankInstance) -> tuple[Dataset, int, RelationFamily]:
    X = inst.A.columns()
    k = 2**inst.rank
    return X, k, RelationFamily.shared(X.dim, field_relation(inst.rank, inst.field))


def gf2_rank(M: np.ndarray) -> int:
    """Rank over GF(2) by Gaussian elimination on packed rows."""
    rows = [int("".join(map(str, row)), 2) for row in np.asarray(M, dtype=np.uint8).tolist() if any(row)]
    rank = 0
    while rows:
        pivot = max(rows)
        rows.remove(pivot)
        rank += 1
        top = pivot.bit_length() - 1
        rows = [x ^ pivot if (x >> top) & 1 else x for x in rows]
        rows = [x for x in rows if x]
    return rank


def centers_to_matrix(
    A: BinaryMatrix, C: CenterSet, F: RelationFamily | None = None, rank: int | None = None, field: str = "gf2"
) -> tuple[BinaryMatrix, int]:
    """Replace each column of A with its nearest center (ties to the lowest index)."""
    if F is not None and not satisfies(C, F):
        raise RelationError("centers do not satisfy the relation family")
    X = A.columns()
    _, j = nearest(X, C)
    B = BinaryMatrix.from_columns(C.bits[j])
    value = int((A.entries != B.entries).sum())
    if rank is not None and field == "gf2":
        distinct = np.unique(B.entries.T, axis=0)
        assert gf2_rank(distinct) <= rank, "reconstruction exceeds the target GF(2) rank"
    return B, value


def best_column_baseline(A: BinaryMatrix) -> tuple[BinaryMatrix, int]:
    """Rank-1 approximation u v^T where u ranges over the columns of A."""
    X = A.columns()
    weight = X.bits.sum(axis=1, dtype=np.int64)  # distance of each column to zero
    best = None
    for u in np.unique(X.bits, axis=0) if X.n else []:
        d = (X.bits != u[None, :]).sum(axis=1)
        use = d < weight
        val = int(np.where(use, d, weight).sum())
        if best is None or val < best[0]:
            best = (val, u, use)
    if best is None or best[0] >= int(weight.sum()):
        return BinaryMatrix(np.zeros_like(A.entries)), int(weight.sum())
    val, u, use = best
    B = np.outer(u, use.astype(np.uint8))
    return BinaryMatrix(B), val


def exhaustive_rank1(A: BinaryMatrix) -> tuple[BinaryMatrix, int]:
    """min over all u in {0,1}^m, v in {0,1}^n of ||A - u v^T||_F^2 (equal for both fields)."""
    m, n = A.rows, A.cols
    if m > 20 or n > 20:
        raise ValueError("exhaustive rank-1 search is limited to 20 x 20")
    U = np.array(list(product((0, 1), repeat=m)), dtype=np.uint8)  # (2^m, m)
    a = A.entries.astype(np.int64)
    # for fixed u, each column independently picks v_j in {0, 1}
    if_one = (a[None, :, :] != U[:, :, None]).sum(axis=1)  # (2^m, n)
    if_zero = a.sum(axis=0)[None, :]
    per_u = np.minimum(if_one, if_zero).sum(axis=1)
    i = int(per_u.argmin())
    v = (if_one[i] < if_zero[0]).astype(np.uint8)
    return BinaryMatrix(np.outer(U[i], v)), int(per_u[i])


def rank_basis_centers(basis: np.ndarray, field: str = "gf2") -> CenterSet:
    """All 2^r combinations of the r basis vectors, in generator order.

    With B = U V, the columns of B are among these combinations of the
    columns of U, so they form a center set satisfying the field relation.
    """
    basis = np.asarray(basis, dtype=np.int64)
    lam = _generators(basis.shape[0])
    if field == "gf2":
        rows = (lam @ basis) % 2
    else:
        rows = (lam @ basis > 0).astype(np.int64)
    return CenterSet(rows.astype(np.uint8))


def instance_cost(A: BinaryMatrix, C: CenterSet) -> int:
    return cost(A.columns(), C)
