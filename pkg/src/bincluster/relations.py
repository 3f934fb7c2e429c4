"""Relations over {0,1}^k and per-coordinate relation families.

A tuple (b_1, ..., b_k) is stored as an int mask with b_1 in the most
significant position, so ascending mask order is lexicographic tuple order.
That order is the canonical one: every "first tuple" tie-break uses it.
Index sets are 1-based, as in the problem statement.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from functools import cached_property
from itertools import combinations, pairwise

import numpy as np

from .bitcore import CenterSet, Dataset, DimensionError

MAX_ARITY = 16


class RelationError(ValueError):
    pass


def tuple_to_mask(bits: Sequence[int]) -> int:
    mask = 0
    for b in bits:
        if b not in (0, 1):
            raise RelationError(f"tuple entries must be 0/1, got {b!r}")
        mask = (mask << 1) | int(b)
    return mask


def mask_to_tuple(mask: int, arity: int) -> tuple[int, ...]:
    return tuple((mask >> (arity - 1 - j)) & 1 for j in range(arity))


def _check_index_set(I: Sequence[int], k: int) -> tuple[int, ...]:
    I = tuple(int(i) for i in I)
    if any(b <= a for a, b in pairwise(I)):
        raise RelationError(f"index set must be strictly increasing: {I}")
    if I and (I[0] < 1 or I[-1] > k):
        raise RelationError(f"index set {I} out of range 1..{k}")
    return I


def complement(I: Sequence[int], k: int) -> tuple[int, ...]:
    s = set(I)
    return tuple(i for i in range(1, k + 1) if i not in s)


def _select(masks: np.ndarray, k: int, I: tuple[int, ...]) -> np.ndarray:
    out = np.zeros_like(masks)
    for pos in I:
        out = (out << 1) | ((masks >> (k - pos)) & 1)
    return out


class Relation:
    """A deduplicated, canonically ordered set of k-ary 0/1 tuples."""

    def __init__(self, arity: int, masks: Iterable[int]):
        if not 0 <= arity <= MAX_ARITY:
            raise RelationError(f"arity {arity} exceeds cap {MAX_ARITY}")
        arr = np.unique(np.asarray(list(masks), dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= (1 << arity)):
            raise RelationError("tuple mask has bits above the arity")
        self.arity = arity
        self.masks = arr
        self.masks.setflags(write=False)
        self._set = frozenset(int(x) for x in arr)

    @classmethod
    def from_tuples(cls, tuples: Iterable[Sequence[int]], arity: int | None = None) -> Relation:
        tuples = [tuple(t) for t in tuples]
        if arity is None:
            if not tuples:
                raise RelationError("cannot infer arity of an empty relation")
            arity = len(tuples[0])
        if any(len(t) != arity for t in tuples):
            raise RelationError("tuples of differing arity")
        return cls(arity, [tuple_to_mask(t) for t in tuples])

    @classmethod
    def from_strings(cls, rows: Iterable[str], arity: int | None = None) -> Relation:
        return cls.from_tuples([[int(ch) for ch in r] for r in rows], arity)

    @classmethod
    def full(cls, k: int) -> Relation:
        return cls(k, range(1 << k))

    def __len__(self) -> int:
        return self.masks.size

    def __iter__(self):
        return (mask_to_tuple(int(x), self.arity) for x in self.masks)

    def __contains__(self, t) -> bool:
        mask = t if isinstance(t, (int, np.integer)) else tuple_to_mask(t)
        return int(mask) in self._set

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self.arity == other.arity and self._set == other._set

    def __hash__(self) -> int:
        return hash((self.arity, self._set))

    def __repr__(self) -> str:
        return f"Relation({self.arity}, {self.to_strings()})"

    def to_strings(self) -> list[str]:
        return ["".join(map(str, t)) for t in self]

    @cached_property
    def table(self) -> np.ndarray:
        """(|R|, k) uint8 matrix of entries, rows in canonical order."""
        k = self.arity
        shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
        return ((self.masks[:, None] >> shifts[None, :]) & 1).astype(np.uint8)

    def project(self, I: Sequence[int]) -> Relation:
        I = _check_index_set(I, self.arity)
        return Relation(len(I), _select(self.masks, self.arity, I))

    def restrict(self, I: Sequence[int], u: Sequence[int] | int) -> Relation:
        I = _check_index_set(I, self.arity)
        umask = u if isinstance(u, (int, np.integer)) else tuple_to_mask(u)
        keep = self.masks[_select(self.masks, self.arity, I) == umask]
        if keep.size == 0:
            raise RelationError(f"pattern {mask_to_tuple(int(umask), len(I))} is not in the projection on {I}")
        return Relation(self.arity, keep)

    def reduce(self, I: Sequence[int], u: Sequence[int] | int) -> Relation:
        """Tuples over the complement of I that merge with ``u`` into a member."""
        I = _check_index_set(I, self.arity)
        return self.restrict(I, u).project(complement(I, self.arity))


def merge(u: int, v: int, I: Sequence[int], k: int) -> int:
    """Interleave u (over I) and v (over the complement of I) into a k-tuple mask."""
    I = tuple(I)
    comp = complement(I, k)
    out = 0
    for j, pos in enumerate(I):
        out |= ((u >> (len(I) - 1 - j)) & 1) << (k - pos)
    for j, pos in enumerate(comp):
        out |= ((v >> (len(comp) - 1 - j)) & 1) << (k - pos)
    return out


class RelationFamily:
    """One relation per coordinate, stored as distinct relations plus an index.

    ``groups`` holds the distinct relations and ``index[i]`` says which one
    applies at coordinate i. A shared family has a single group.
    """

    def __init__(self, m: int, relations: Sequence[Relation], index: np.ndarray | None = None):
        if not relations:
            raise RelationError("a family needs at least one relation")
        arities = {r.arity for r in relations}
        if len(arities) != 1:
            raise RelationError(f"relations of differing arity {sorted(arities)}")
        self.m = m
        self.arity = arities.pop()
        self.groups = tuple(relations)
        if index is None:
            if len(self.groups) != 1:
                raise RelationError("multiple relations need a coordinate index")
            index = np.zeros(m, dtype=np.intp)
        index = np.asarray(index, dtype=np.intp)
        if index.shape != (m,):
            raise RelationError(f"per-coordinate family needs exactly {m} entries, got {index.shape[0]}")
        if m and (index.min() < 0 or index.max() >= len(self.groups)):
            raise RelationError("coordinate index out of range")
        self.index = index
        self.index.setflags(write=False)

    @classmethod
    def shared(cls, m: int, relation: Relation) -> RelationFamily:
        return cls(m, [relation])

    @classmethod
    def per_coordinate(cls, relations: Sequence[Relation]) -> RelationFamily:
        distinct: dict[Relation, int] = {}
        index = [distinct.setdefault(r, len(distinct)) for r in relations]
        groups = list(distinct)
        if not groups:
            raise RelationError("empty per-coordinate family")
        return cls(len(relations), groups, np.array(index, dtype=np.intp))

    @property
    def is_shared(self) -> bool:
        return len(self.groups) == 1

    @property
    def k(self) -> int:
        return self.arity

    def relation(self, i: int) -> Relation:
        return self.groups[self.index[i]]

    def coords(self, g: int) -> np.ndarray:
        return self.coord_groups[g]

    @cached_property
    def coord_groups(self) -> tuple[np.ndarray, ...]:
        return tuple(np.flatnonzero(self.index == g) for g in range(len(self.groups)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RelationFamily):
            return NotImplemented
        if self.m != other.m or self.arity != other.arity:
            return False
        return all(self.relation(i) == other.relation(i) for i in range(self.m))

    def __repr__(self) -> str:
        kind = "shared" if self.is_shared else f"{len(self.groups)} distinct"
        return f"RelationFamily(m={self.m}, k={self.arity}, {kind})"

    def _map(self, fn) -> RelationFamily:
        return RelationFamily(self.m, [fn(r) for r in self.groups], self.index)

    def project(self, I: Sequence[int]) -> RelationFamily:
        return _compact(self._map(lambda r: r.project(I)))


def _compact(F: RelationFamily) -> RelationFamily:
    distinct: dict[Relation, int] = {}
    remap = np.array([distinct.setdefault(r, len(distinct)) for r in F.groups], dtype=np.intp)
    return RelationFamily(F.m, list(distinct), remap[F.index])


def patterns(C: CenterSet) -> np.ndarray:
    """Per-coordinate mask of (c_1[i], ..., c_q[i]) with c_1 most significant."""
    out = np.zeros(C.dim, dtype=np.int64)
    for row in C.bits:
        out = (out << 1) | row
    return out


def _check_centers(C: CenterSet, F: RelationFamily, arity: int) -> None:
    if C.size != arity:
        raise RelationError(f"expected {arity} centers, got {C.size}")
    if C.dim != F.m:
        raise DimensionError(f"centers have dimension {C.dim}, family covers {F.m} coordinates")


def satisfies(C: CenterSet, F: RelationFamily) -> bool:
    _check_centers(C, F, F.arity)
    pat = patterns(C)
    for g, rel in enumerate(F.groups):
        sel = pat[F.index == g]
        if sel.size and not np.isin(sel, rel.masks).all():
            return False
    return True


def reduce_family(F: RelationFamily, I: Sequence[int], C: CenterSet) -> RelationFamily:
    """The family of relations R_i(I, (c_1[i], ..., c_r[i])) over the complement of I."""
    I = _check_index_set(I, F.arity)
    _check_centers(C, F, len(I))
    if not satisfies(C, F.project(I)):
        raise RelationError("centers do not satisfy the projection of the family on I")
    pat = patterns(C)
    key = F.index.astype(np.int64) * (1 << len(I)) + pat
    uniq, inverse = np.unique(key, return_inverse=True)
    reduced = [F.groups[int(v) >> len(I)].reduce(I, int(v) & ((1 << len(I)) - 1)) for v in uniq]
    return _compact(RelationFamily(F.m, reduced, inverse.reshape(-1)))


def try_reduce_family(F: RelationFamily, I: Sequence[int], C: CenterSet) -> RelationFamily | None:
    try:
        return reduce_family(F, I, C)
    except RelationError:
        return None


def extend_solution(X: Dataset, F: RelationFamily, C: CenterSet) -> CenterSet:
    """Complete centers occupying ``C.index_set`` to a full k-set satisfying F.

    Each coordinate takes the canonically first tuple that agrees with C's
    pattern there. Existing centers are kept, so the cost cannot increase.
    """
    k = F.arity
    I = _check_index_set(C.index_set, k)
    if C.dim != F.m:
        raise DimensionError(f"centers have dimension {C.dim}, family covers {F.m} coordinates")
    if X.dim != F.m:
        raise DimensionError(f"data has dimension {X.dim}, family covers {F.m} coordinates")
    if len(I) == k:
        if not satisfies(C, F):
            raise RelationError("centers do not satisfy the family")
        return C
    pat = patterns(C) if I else np.zeros(F.m, dtype=np.int64)
    out = np.zeros((k, F.m), dtype=np.uint8)
    for pos, row in zip(I, C.bits):
        out[pos - 1] = row
    for g, rel in enumerate(F.groups):
        coords = F.coords(g)
        if coords.size == 0:
            continue
        sel = _select(rel.masks, k, I)
        for u in np.unique(pat[coords]):
            hits = np.flatnonzero(sel == u)
            if hits.size == 0:
                raise RelationError("centers do not satisfy the projection of the family on their index set")
            first = rel.table[hits[0]]
            where = coords[pat[coords] == u]
            out[:, where] = first[:, None]
    return CenterSet(out, tuple(range(1, k + 1)))


def index_sets(k: int, size: int) -> list[tuple[int, ...]]:
    return list(combinations(range(1, k + 1), size))
