"""Bit-packed binary vectors, Hamming distances and clustering costs.

Vectors are packed little-endian into uint64 words. Bits past ``dim`` are
always zero, so a popcount over whole words is an exact Hamming distance.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

WORD_BITS = 64

# rows of the distance matrix computed per block; bounds peak memory
_BLOCK_ROWS = 1 << 15


class DimensionError(ValueError):
    pass


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack an (n, m) 0/1 array into (n, ceil(m/64)) uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 2:
        raise ValueError("expected a 2-D array of bits")
    n, m = bits.shape
    words = max(1, -(-m // WORD_BITS))
    packed = np.packbits(bits, axis=1, bitorder="little")
    out = np.zeros((n, words * 8), dtype=np.uint8)
    out[:, : packed.shape[1]] = packed
    return out.view("<u8").reshape(n, words)


def unpack_rows(words: np.ndarray, dim: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    as_bytes = words.view(np.uint8).reshape(words.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little", count=dim)


def _parse_bits(text: str) -> np.ndarray:
    if any(ch not in "01" for ch in text):
        raise ValueError(f"not a 0/1 string: {text!r}")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


@dataclass(frozen=True, eq=False)
class BinaryVector:
    dim: int
    words: np.ndarray

    @classmethod
    def from_bits(cls, bits: Sequence[int] | np.ndarray) -> BinaryVector:
        arr = np.asarray(bits, dtype=np.uint8).reshape(1, -1)
        if arr.size and arr.max() > 1:
            raise ValueError("entries must be 0 or 1")
        return cls(arr.shape[1], pack_rows(arr)[0])

    @classmethod
    def from_string(cls, text: str) -> BinaryVector:
        return cls.from_bits(_parse_bits(text))

    def to_bits(self) -> np.ndarray:
        return unpack_rows(self.words[None, :], self.dim)[0]

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.dim:
            raise IndexError(i)
        return int((self.words[i // WORD_BITS] >> np.uint64(i % WORD_BITS)) & np.uint64(1))

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.to_bits())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryVector):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.dim, self.words.tobytes()))


class Dataset:
    """An ordered multiset of n binary vectors of a common dimension.

    Both the unpacked (n, m) uint8 matrix and its packed words are kept: the
    former feeds per-coordinate counts, the latter distance kernels.
    """

    def __init__(self, bits: np.ndarray, dim: int | None = None):
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim == 1 and bits.size == 0:
            bits = bits.reshape(0, dim or 0)
        if bits.ndim != 2:
            raise ValueError("dataset bits must be 2-D")
        if dim is not None and bits.shape[1] != dim:
            raise DimensionError(f"rows have {bits.shape[1]} entries, expected {dim}")
        if bits.size and bits.max() > 1:
            raise ValueError("entries must be 0 or 1")
        self.bits = bits
        self.bits.setflags(write=False)
        self.packed = pack_rows(bits)
        self.packed.setflags(write=False)

    @classmethod
    def from_strings(cls, rows: Iterable[str], dim: int | None = None) -> Dataset:
        rows = list(rows)
        if not rows:
            return cls(np.zeros((0, dim or 0), dtype=np.uint8))
        return cls(np.stack([_parse_bits(r) for r in rows]), dim)

    @classmethod
    def from_vectors(cls, vectors: Sequence[BinaryVector], dim: int | None = None) -> Dataset:
        if not vectors:
            return cls(np.zeros((0, dim or 0), dtype=np.uint8))
        dims = {v.dim for v in vectors}
        if len(dims) != 1:
            raise DimensionError("vectors of different dimensions")
        return cls(np.stack([v.to_bits() for v in vectors]), dim)

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @property
    def dim(self) -> int:
        return self.bits.shape[1]

    def __len__(self) -> int:
        return self.n

    def vector(self, i: int) -> BinaryVector:
        return BinaryVector(self.dim, self.packed[i].copy())

    def subset(self, idx: np.ndarray) -> Dataset:
        return Dataset(self.bits[np.asarray(idx, dtype=np.intp)], self.dim)

    def to_strings(self) -> list[str]:
        return ["".join("1" if b else "0" for b in row) for row in self.bits]


@dataclass(frozen=True, eq=False)
class CenterSet:
    """Ordered centers plus the 1-based index positions in [k] they occupy."""

    bits: np.ndarray
    index_set: tuple[int, ...] = ()

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 2:
            raise ValueError("centers must be a 2-D array")
        index_set = tuple(self.index_set) or tuple(range(1, bits.shape[0] + 1))
        if len(index_set) != bits.shape[0]:
            raise ValueError("index set size differs from number of centers")
        if any(b <= a for a, b in itertools.pairwise(index_set)) or (index_set and index_set[0] < 1):
            raise ValueError(f"index set must be strictly increasing and 1-based: {index_set}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "index_set", index_set)

    @cached_property
    def packed(self) -> np.ndarray:
        return pack_rows(self.bits)

    @classmethod
    def from_strings(cls, rows: Sequence[str], index_set: Sequence[int] = ()) -> CenterSet:
        return cls(np.stack([_parse_bits(r) for r in rows]), tuple(index_set))

    @property
    def size(self) -> int:
        return self.bits.shape[0]

    @property
    def dim(self) -> int:
        return self.bits.shape[1]

    def __len__(self) -> int:
        return self.size

    def to_strings(self) -> list[str]:
        return ["".join("1" if b else "0" for b in row) for row in self.bits]

    def key(self) -> tuple:
        return (self.index_set, self.bits.tobytes())


def _popcount_sum(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def hamming(x: BinaryVector, y: BinaryVector) -> int:
    if x.dim != y.dim:
        raise DimensionError(f"dimension mismatch: {x.dim} vs {y.dim}")
    return int(_popcount_sum(x.words ^ y.words))


def distance_matrix(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """(n, q) Hamming distances between packed point rows and packed center rows."""
    n = points.shape[0]
    out = np.empty((n, centers.shape[0]), dtype=np.int64)
    for start in range(0, n, _BLOCK_ROWS):
        block = points[start : start + _BLOCK_ROWS]
        out[start : start + block.shape[0]] = _popcount_sum(block[:, None, :] ^ centers[None, :, :])
    return out


def _check(X: Dataset, C: CenterSet) -> None:
    if C.size == 0:
        raise ValueError("empty center set")
    if X.dim != C.dim:
        raise DimensionError(f"dimension mismatch: data {X.dim} vs centers {C.dim}")


def nearest(X: Dataset, C: CenterSet, idx: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Distance to and index of the nearest center for every point (ties -> lowest index)."""
    _check(X, C)
    pts = X.packed if idx is None else X.packed[idx]
    d = distance_matrix(pts, C.packed)
    if d.shape[0] == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    j = d.argmin(axis=1)
    return d[np.arange(d.shape[0]), j], j


def dist_to_set(x: BinaryVector, C: CenterSet) -> tuple[int, int]:
    if C.size == 0:
        raise ValueError("empty center set")
    if x.dim != C.dim:
        raise DimensionError(f"dimension mismatch: {x.dim} vs {C.dim}")
    d = _popcount_sum(C.packed ^ x.words[None, :])
    j = int(d.argmin())
    return int(d[j]), j


def cost(X: Dataset, C: CenterSet) -> int:
    dist, _ = nearest(X, C)
    return int(dist.sum())


@dataclass(frozen=True)
class CoordCounts:
    """Per-set, per-coordinate tallies: ``zeros[j, i]`` and ``ones[j, i]``."""

    zeros: np.ndarray
    ones: np.ndarray

    @property
    def k_sets(self) -> int:
        return self.ones.shape[0]

    @property
    def dim(self) -> int:
        return self.ones.shape[1]

    @property
    def sizes(self) -> np.ndarray:
        return self.zeros[:, 0] + self.ones[:, 0] if self.dim else np.zeros(self.k_sets, dtype=np.int64)


def coord_counts(sets: Sequence[np.ndarray | Dataset], dim: int | None = None) -> CoordCounts:
    """Zero/one tallies for each multiset, given as Datasets or (s, m) 0/1 arrays."""
    mats = [s.bits if isinstance(s, Dataset) else np.asarray(s, dtype=np.uint8) for s in sets]
    dims = {mat.shape[1] for mat in mats if mat.ndim == 2}
    if dim is not None:
        dims.add(dim)
    if len(dims) > 1:
        raise DimensionError(f"sets have differing dimensions {sorted(dims)}")
    m = dims.pop() if dims else 0
    ones = np.zeros((len(mats), m), dtype=np.int64)
    zeros = np.zeros((len(mats), m), dtype=np.int64)
    for j, mat in enumerate(mats):
        mat = mat.reshape(-1, m)
        ones[j] = mat.sum(axis=0, dtype=np.int64)
        zeros[j] = mat.shape[0] - ones[j]
    return CoordCounts(zeros, ones)
