"""End-to-end sample-based prophet policy.

Training has two stages on disjoint random substreams: quantile thresholds
are learned first from dedicated sample vectors, then the chain
decomposition is trained on fresh sample vectors pushed through the same
activate-then-thin pipeline the live run uses.  The online pass flips the
activation and thinning coins per arriving item and feeds survivors to the
layered greedy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .matroid import Matroid, matroid_from_spec, max_weight_basis
from .ocrs import (
    ChainDecomposition,
    LayeredGreedy,
    OcrsParams,
    decompose_sampled,
    default_params,
    shrink,
)
from .rng import substream
from .thresholds import ThresholdTable, default_sample_count, learn_thresholds
from .values import Instance, sample_vector


@dataclass
class ProphetPolicy:
    """Trained thresholds + chain decomposition, ready for online runs."""

    matroid: Matroid
    table: ThresholdTable
    decomp: ChainDecomposition
    params: OcrsParams
    eps: float
    status: str = "ok"
    threshold_samples: int = 0
    ocrs_samples: int = 0
    seed_lineage: dict = field(default_factory=dict)
    _greedy: LayeredGreedy | None = field(default=None, repr=False, compare=False)

    @property
    def total_samples(self) -> int:
        return self.threshold_samples + self.ocrs_samples

    def online_greedy(self) -> LayeredGreedy:
        if self._greedy is None:
            self._greedy = LayeredGreedy(self.matroid, self.decomp)
        return self._greedy

    def to_spec(self) -> dict:
        return {
            "matroid": self.matroid.to_spec(),
            "table": self.table.to_spec(),
            "decomposition": self.decomp.to_spec(),
            "params": self.params.to_spec(),
            "eps": self.eps,
            "status": self.status,
            "threshold_samples": self.threshold_samples,
            "ocrs_samples": self.ocrs_samples,
            "seed_lineage": dict(self.seed_lineage),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_spec(), sort_keys=True)

    @classmethod
    def from_spec(cls, spec: dict) -> "ProphetPolicy":
        return cls(
            matroid=matroid_from_spec(spec["matroid"]),
            table=ThresholdTable.from_spec(spec["table"]),
            decomp=ChainDecomposition.from_spec(spec["decomposition"]),
            params=OcrsParams.from_spec(spec["params"]),
            eps=spec["eps"],
            status=spec.get("status", "ok"),
            threshold_samples=spec.get("threshold_samples", 0),
            ocrs_samples=spec.get("ocrs_samples", 0),
            seed_lineage=spec.get("seed_lineage", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "ProphetPolicy":
        return cls.from_spec(json.loads(text))


def train(
    inst: Instance,
    eps: float,
    seed: int,
    threshold_samples: int | None = None,
    params: OcrsParams | None = None,
    rng_label: str = "prophet-train",
) -> ProphetPolicy:
    """Train a prophet policy on the given instance.

    Stage one consumes its own substream for threshold learning; stage two
    draws fresh value vectors per decomposition layer, activates and thins
    them, and feeds them to the sampled chain decomposition.  Sample
    counts are recorded on the policy.
    """
    if not 0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    m = inst.matroid
    if threshold_samples is None:
        threshold_samples = default_sample_count(m.n, eps)
    if params is None:
        params = default_params(max(m.n, 2), eps)
    table = learn_thresholds(
        m, inst.dists, threshold_samples, eps, substream(seed, f"{rng_label}:thresholds")
    )

    drawn = {"count": 0}

    def sample_source(count: int, layer: int):
        batch_rng = substream(seed, f"{rng_label}:ocrs-layer", layer)
        out = []
        for _ in range(count):
            values = sample_vector(inst, batch_rng)
            active = table.activate(values, batch_rng)
            out.append(shrink(active, params.b, batch_rng))
        drawn["count"] += count
        return out

    decomp = decompose_sampled(
        m, sample_source, params, substream(seed, f"{rng_label}:ocrs-cutoffs")
    )
    status = "ok" if decomp.status == "ok" else f"decomposition {decomp.status}"
    return ProphetPolicy(
        matroid=m,
        table=table,
        decomp=decomp,
        params=params,
        eps=eps,
        status=status,
        threshold_samples=threshold_samples,
        ocrs_samples=drawn["count"],
        seed_lineage={"seed": seed, "label": rng_label},
    )


def run_online(
    policy: ProphetPolicy,
    values,
    rng: np.random.Generator,
    order=None,
) -> tuple[set[int], float]:
    """One irrevocable online pass over the realized values.

    Per arriving item: activation coin, thinning coin, then the layered
    greedy feasibility test.  A failed policy accepts nothing.
    """
    if policy.status != "ok":
        return set(), 0.0
    m = policy.matroid
    if order is None:
        order = range(m.n)
    greedy = policy.online_greedy()
    accepted: set[int] = set()
    layer_builders = []
    for basis in greedy._inner_bases:
        builder = m.make_builder()
        for e in basis:
            builder.add(e)
        layer_builders.append(builder)
    total = 0.0
    coins = rng.random((m.n, 2))
    for e in order:
        p_act = policy.table.activation_probability(e, values[e])
        if coins[e, 0] >= p_act:
            continue
        if coins[e, 1] >= policy.params.b:
            continue
        i = greedy.layer_of[e]
        if layer_builders[i].can_add(e):
            layer_builders[i].add(e)
            accepted.add(e)
            total += float(values[e][0])
    return accepted, total


def expected_opt(inst: Instance, trials: int, rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo estimate (mean, stderr) of the offline optimum value."""
    if trials < 1:
        raise ValueError("trials must be positive")
    m = inst.matroid
    totals = np.empty(trials)
    for t in range(trials):
        values = sample_vector(inst, rng)
        basis = max_weight_basis(m, values)
        totals[t] = sum(values[e].base for e in basis)
    mean = float(totals.mean())
    stderr = float(totals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr
