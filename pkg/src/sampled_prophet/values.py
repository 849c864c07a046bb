"""Value distributions and tie-broken totally ordered values.

Point masses are handled by lifting every draw to a (base, tiebreak) pair
with a fresh uniform tiebreaker, ordered lexicographically.  Equal pairs
then occur with probability zero, so every comparison downstream (greedy,
exchange values, thresholds) is strict.  The whole pipeline stores and
compares values in this lifted space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .matroid import Matroid, MatroidError, matroid_from_spec


class TieBrokenValue(NamedTuple):
    base: float
    tiebreak: float


#: Sorts below every sampled value: used for exchange values of elements
#: that extend the optimum for free (the dummy-element convention).
ZERO_VALUE = TieBrokenValue(0.0, float("-inf"))

#: Top sentinel for the last threshold bucket.
INF_VALUE = TieBrokenValue(float("inf"), float("inf"))


class DistributionError(ValueError):
    """Invalid distribution parameters."""


class ValueDistribution:
    """Nonnegative value distribution; subclasses implement sampling."""

    continuous: bool = True

    def sample_base(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class UniformDist(ValueDistribution):
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.a < 0 or self.b < self.a:
            raise DistributionError("uniform distribution needs 0 <= a <= b")

    def sample_base(self, rng, size=None):
        return rng.uniform(self.a, self.b, size=size)

    def to_spec(self):
        return {"kind": "uniform", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class ExponentialDist(ValueDistribution):
    rate: float = 1.0

    def __post_init__(self):
        if self.rate <= 0:
            raise DistributionError("exponential rate must be positive")

    def sample_base(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size=size)

    def to_spec(self):
        return {"kind": "exponential", "rate": self.rate}


@dataclass(frozen=True)
class DiscreteDist(ValueDistribution):
    points: tuple[float, ...] = (0.0,)
    masses: tuple[float, ...] = (1.0,)
    continuous = False

    def __init__(self, points, masses):
        points = tuple(float(p) for p in points)
        masses = tuple(float(w) for w in masses)
        if len(points) != len(masses) or not points:
            raise DistributionError("points and masses must be nonempty and equal-length")
        if any(p < 0 for p in points):
            raise DistributionError("support must be nonnegative")
        if any(w < 0 for w in masses) or abs(sum(masses) - 1.0) > 1e-9:
            raise DistributionError("masses must be nonnegative and sum to 1")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "masses", masses)

    def sample_base(self, rng, size=None):
        return rng.choice(np.asarray(self.points), size=size, p=np.asarray(self.masses))

    def to_spec(self):
        return {"kind": "discrete", "points": list(self.points), "masses": list(self.masses)}


@dataclass(frozen=True)
class BernoulliScaledDist(ValueDistribution):
    value: float = 1.0
    p: float = 0.5

    continuous = False

    def __post_init__(self):
        if self.value < 0:
            raise DistributionError("value must be nonnegative")
        if not 0 <= self.p <= 1:
            raise DistributionError("probability must lie in [0, 1]")

    def sample_base(self, rng, size=None):
        coins = rng.random(size=size) < self.p
        return np.asarray(coins, dtype=float) * self.value

    def to_spec(self):
        return {"kind": "bernoulli", "value": self.value, "p": self.p}


@dataclass(frozen=True)
class ConstantDist(ValueDistribution):
    value: float = 0.0

    continuous = False

    def __post_init__(self):
        if self.value < 0:
            raise DistributionError("value must be nonnegative")

    def sample_base(self, rng, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def to_spec(self):
        return {"kind": "constant", "value": self.value}


def distribution_from_spec(spec: dict) -> ValueDistribution:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DistributionError("distribution spec must be an object with a 'kind' tag")
    kind = spec["kind"]
    try:
        if kind == "uniform":
            return UniformDist(a=spec.get("a", 0.0), b=spec.get("b", 1.0))
        if kind == "exponential":
            return ExponentialDist(rate=spec.get("rate", 1.0))
        if kind == "discrete":
            return DiscreteDist(spec["points"], spec["masses"])
        if kind == "bernoulli":
            return BernoulliScaledDist(value=spec["value"], p=spec["p"])
        if kind == "constant":
            return ConstantDist(value=spec["value"])
    except KeyError as exc:
        raise DistributionError(f"distribution spec for kind={kind!r} missing field {exc}") from exc
    raise DistributionError(f"unknown distribution kind {kind!r}")


def sample_value(dist: ValueDistribution, rng: np.random.Generator) -> TieBrokenValue:
    """One lifted draw: base from the distribution, tiebreak uniform [0,1]."""
    return TieBrokenValue(float(dist.sample_base(rng)), float(rng.random()))


@dataclass
class Instance:
    """A matroid plus one value distribution per element and an arrival order."""

    matroid: Matroid
    dists: list[ValueDistribution]
    arrival_order: list[int] | None = None

    def __post_init__(self):
        if len(self.dists) != self.matroid.n:
            raise MatroidError(
                f"expected {self.matroid.n} distributions, got {len(self.dists)}"
            )
        if self.arrival_order is not None:
            if sorted(self.arrival_order) != list(range(self.matroid.n)):
                raise MatroidError("arrival order must be a permutation of [0, n)")

    @property
    def n(self) -> int:
        return self.matroid.n

    def order(self) -> list[int]:
        return list(self.arrival_order) if self.arrival_order else list(range(self.n))

    def to_spec(self) -> dict:
        spec = {
            "matroid": self.matroid.to_spec(),
            "distributions": [d.to_spec() for d in self.dists],
        }
        if self.arrival_order is not None:
            spec["arrival_order"] = list(self.arrival_order)
        return spec

    @classmethod
    def from_spec(cls, spec: dict) -> "Instance":
        return cls(
            matroid=matroid_from_spec(spec["matroid"]),
            dists=[distribution_from_spec(d) for d in spec["distributions"]],
            arrival_order=spec.get("arrival_order"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        return cls.from_spec(json.loads(text))


def sample_vector(inst: Instance, rng: np.random.Generator) -> list[TieBrokenValue]:
    """One independent lifted draw per element; deterministic given rng."""
    return [sample_value(d, rng) for d in inst.dists]


def sample_matrix(dists, rng: np.random.Generator, count: int):
    """count independent value vectors as (base, tiebreak) arrays of shape (count, n)."""
    n = len(dists)
    base = np.empty((count, n))
    for i, d in enumerate(dists):
        base[:, i] = d.sample_base(rng, size=count)
    tie = rng.random((count, n))
    return base, tie


def vector_from_row(base_row, tie_row) -> list[TieBrokenValue]:
    return [TieBrokenValue(float(b), float(t)) for b, t in zip(base_row, tie_row)]
