"""Random instance generators shared by the test suite and the scripts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitcore import Dataset
from .relations import Relation, RelationFamily


@dataclass
class Instance:
    X: Dataset
    k: int
    F: RelationFamily


def random_relation(rng: np.random.Generator, k: int, size: int | None = None) -> Relation:
    if size is None:
        size = int(rng.integers(1, 2**k + 1))
    return Relation(k, rng.choice(2**k, size=size, replace=False))


def random_instance(
    rng: np.random.Generator,
    n_range: tuple[int, int] = (4, 8),
    m_range: tuple[int, int] = (3, 6),
    ks: tuple[int, ...] = (2, 3),
) -> Instance:
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    k = int(rng.choice(ks))
    X = Dataset(rng.integers(0, 2, size=(n, m), dtype=np.uint8))
    return Instance(X, k, RelationFamily.shared(m, random_relation(rng, k)))


def oracle_suite(seed: int = 2024, count: int = 50) -> list[Instance]:
    rng = np.random.default_rng(seed)
    return [random_instance(rng) for _ in range(count)]
