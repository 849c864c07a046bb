"""Deterministic random substreams.

Every logical consumer of randomness (threshold learning, each OCRS
training layer, each evaluation trial, ...) derives its own independent
generator from the single master seed via a (seed, label, counter) key.
The resulting streams do not depend on thread count or call order, which
is what makes experiment reports byte-reproducible.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream(seed: int, label: str, counter: int = 0) -> np.random.Generator:
    """Return a generator keyed by (seed, label, counter).

    Distinct (label, counter) pairs yield statistically independent
    streams; identical keys always yield the identical stream.
    """
    digest = hashlib.sha256(f"{label}:{counter}".encode()).digest()
    words = tuple(int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4))
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=words))
