"""Shared helpers: brute-force oracles and random instance generators."""

import itertools

import numpy as np
import pytest

from sampled_prophet.matroid import (
    GraphicMatroid,
    Matroid,
    PartitionMatroid,
    UniformMatroid,
)
from sampled_prophet.values import TieBrokenValue


def all_subsets(n):
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            yield set(combo)


def brute_force_rank(m: Matroid, S) -> int:
    """Max size of an independent subset of S, by exhaustive enumeration."""
    S = sorted(S)
    best = 0
    for size in range(len(S), 0, -1):
        for combo in itertools.combinations(S, size):
            if m.is_independent(set(combo)):
                return size
    return best


def independent_masks(m: Matroid) -> np.ndarray:
    """Boolean array over all bitmasks: is the subset independent?"""
    n = m.n
    out = np.zeros(1 << n, dtype=bool)
    for mask in range(1 << n):
        out[mask] = m.is_independent({e for e in range(n) if mask >> e & 1})
    return out


def random_matroid(rng: np.random.Generator, max_n: int = 10) -> Matroid:
    """A random small matroid from the built-in families (no loops)."""
    kind = rng.integers(4)
    if kind == 0:
        n = int(rng.integers(2, max_n + 1))
        r = int(rng.integers(1, n + 1))
        return UniformMatroid(n, r)
    if kind == 1:
        blocks, caps, used = [], [], 0
        while used < max_n - 1:
            size = int(rng.integers(1, min(3, max_n - used) + 1))
            blocks.append(list(range(used, used + size)))
            caps.append(int(rng.integers(1, size + 1)))
            used += size
        return PartitionMatroid(blocks, caps)
    if kind == 2:
        # Random connected-ish multigraph without self-loops.
        v = int(rng.integers(3, 6))
        n = int(rng.integers(2, max_n + 1))
        edges = []
        for _ in range(n):
            a = int(rng.integers(v))
            b = int(rng.integers(v - 1))
            if b >= a:
                b += 1
            edges.append((a, b))
        return GraphicMatroid(v, edges)
    n = int(rng.integers(2, max_n + 1))
    r = int(rng.integers(1, n + 1))
    base = UniformMatroid(n + 1, r)
    return base.restrict(set(range(n)))


def random_values(rng: np.random.Generator, n: int):
    return [TieBrokenValue(float(b), float(t)) for b, t in zip(rng.random(n) * 10, rng.random(n))]


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
