"""Protected-set selection, chain decomposition, and the layered greedy OCRS.

The scheme protects elements whose probability of being spanned by the
other active elements exceeds a cutoff, recurses on the protected set to
build a nested chain of layers, and then runs one online greedy pass per
layer with the next layer pretend-accepted up front.  Span probabilities
come from one of three oracles: exact subset enumeration (small ground
sets), fresh Monte Carlo draws, or a fixed batch of sample active sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .matroid import (
    GraphicMatroid,
    Matroid,
    MatroidError,
    rank_table,
    span_table,
)

MASK_TABLE_MAX_N = 16


# ---------------------------------------------------------------------------
# Parameters
# ---------------------------------------------------------------------------


@dataclass
class OcrsParams:
    """Knobs of the sampled chain decomposition.

    cutoffs is the arithmetic grid c_1..c_{k+1}; each layer draws j
    uniformly from [k] and protects at the midpoint (c_j + c_{j+1}) / 2.
    """

    eps: float
    b: float = 0.5
    k: int = 2
    cutoffs: np.ndarray = field(default_factory=lambda: np.array([0.55, 0.6]))
    s: int = 1
    ell_max: int = 8
    c_s: float = 8.0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.s < 1:
            raise ValueError("s must be at least 1")
        if len(self.cutoffs) != self.k + 1:
            raise ValueError("need k + 1 cutoff values")
        if not 0 < self.b <= 1:
            raise ValueError("b must lie in (0, 1]")

    def midpoint(self, j: int) -> float:
        """Protection cutoff used when layer randomness draws j in [0, k)."""
        return 0.5 * (self.cutoffs[j] + self.cutoffs[j + 1])

    def to_spec(self) -> dict:
        return {
            "eps": self.eps,
            "b": self.b,
            "k": self.k,
            "cutoffs": [float(c) for c in self.cutoffs],
            "s": self.s,
            "ell_max": self.ell_max,
            "c_s": self.c_s,
        }

    @classmethod
    def from_spec(cls, spec: dict) -> "OcrsParams":
        return cls(
            eps=spec["eps"],
            b=spec["b"],
            k=spec["k"],
            cutoffs=np.asarray(spec["cutoffs"], dtype=float),
            s=spec["s"],
            ell_max=spec["ell_max"],
            c_s=spec.get("c_s", 8.0),
        )


def default_params(n: int, eps: float, c_s: float = 8.0, s: int | None = None) -> OcrsParams:
    """Default parameterization for ground-set size n and accuracy eps.

    The sample count per layer grows like k^2 log n log(1/eps) / eps^2
    with an explicit constant c_s; pass s to override it outright.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    log_n = math.log(n)
    k = max(2, math.ceil(log_n / (math.log(1 + eps) * math.log(1 - eps) / math.log(0.25))))
    cutoffs = np.linspace(0.5 + eps / 2.0, 0.5 + eps, k + 1)
    if s is None:
        s = math.ceil(c_s * k * k * log_n * math.log(1.0 / eps) / eps**2)
    ell_max = math.ceil(log_n / math.log(1 + eps)) + 2
    return OcrsParams(eps=eps, b=0.5, k=k, cutoffs=cutoffs, s=int(s), ell_max=ell_max, c_s=c_s)


def shrink(active, b: float, rng: np.random.Generator) -> set[int]:
    """Independent thinning: keep each active element with probability b."""
    if not 0 < b <= 1:
        raise ValueError("b must lie in (0, 1]")
    active = sorted(active)
    coins = rng.random(len(active))
    return {e for e, c in zip(active, coins) if c < b}


# ---------------------------------------------------------------------------
# Span probability oracles
# ---------------------------------------------------------------------------


def _spanned_candidates(m: Matroid, present: set[int], candidates) -> set[int]:
    """Elements e among candidates with e in span(present - {e}).

    Graphic matroids get a bridge-based fast path; otherwise a maximal
    independent subset of `present` answers most membership queries and
    only its own elements need a rank recomputation.
    """
    if isinstance(m, GraphicMatroid):
        bridges = m.bridge_edges(present)
        builder = m.make_builder()
        for e in present:
            if builder.can_add(e):
                builder.add(e)
        out = set()
        for e in candidates:
            if e in present:
                if e not in bridges:
                    out.add(e)
            elif not builder.can_add(e):
                out.add(e)
        return out

    basis: list[int] = []
    builder = m.make_builder()
    for e in sorted(present):
        if builder.can_add(e):
            builder.add(e)
            basis.append(e)
    basis_set = set(basis)
    out = set()
    for e in candidates:
        if e in present:
            if e in basis_set:
                # Spanned after removal iff some other basis avoids e.
                if m.rank(present - {e}) == len(basis):
                    out.add(e)
            else:
                out.add(e)
        elif not builder.can_add(e):
            out.add(e)
    return out


class SpanProbOracle:
    """Answers Pr[e in Span(((R & N) | S) - {e})] for candidate elements."""

    def probabilities(self, N: set[int], S: set[int], candidates) -> dict[int, float]:
        raise NotImplementedError


class _MaskTables:
    """Cached subset rank/span tables for one small matroid."""

    def __init__(self, m: Matroid):
        ranks = rank_table(m)
        self.spanned = span_table(m, ranks)
        self.ranks = ranks


def _mask_tables(m: Matroid) -> _MaskTables:
    # Cached on the (immutable) matroid instance itself.
    tables = getattr(m, "_mask_tables_cache", None)
    if tables is None:
        tables = _MaskTables(m)
        m._mask_tables_cache = tables
    return tables


def _to_mask(elems) -> int:
    mask = 0
    for e in elems:
        mask |= 1 << e
    return mask


class ExactSpanOracle(SpanProbOracle):
    """Exact probabilities by enumeration over active-set realizations."""

    def __init__(self, m: Matroid, x):
        self.m = m
        self.x = np.asarray(x, dtype=float)
        if self.x.shape != (m.n,):
            raise MatroidError(f"expected probability vector of length {m.n}")
        if np.any(self.x < 0) or np.any(self.x > 1):
            raise MatroidError("probabilities must lie in [0, 1]")
        if m.n > 20:
            raise MatroidError("exact span oracle unsupported for n > 20")

    def probabilities(self, N, S, candidates):
        members = sorted(N)
        weights = np.ones(1)
        for e in members:
            weights = np.concatenate([weights * (1 - self.x[e]), weights * self.x[e]])
        # Local subset index -> global element mask.
        size = 1 << len(members)
        if self.m.n <= MASK_TABLE_MAX_N:
            tables = _mask_tables(self.m)
            local = np.arange(size, dtype=np.int64)
            global_masks = np.zeros(size, dtype=np.int64)
            for pos, e in enumerate(members):
                global_masks |= ((local >> pos) & 1) << e
            global_masks |= _to_mask(S)
            out = {}
            for e in candidates:
                out[e] = float(weights @ tables.spanned[global_masks, e])
            return out
        candidates = list(candidates)
        totals = {e: 0.0 for e in candidates}
        for idx in range(size):
            present = {members[pos] for pos in range(len(members)) if (idx >> pos) & 1}
            present |= set(S)
            for e in _spanned_candidates(self.m, present, candidates):
                totals[e] += float(weights[idx])
        return totals


class EmpiricalSpanOracle(SpanProbOracle):
    """Empirical probabilities over a fixed batch of sample active sets."""

    def __init__(self, m: Matroid, samples):
        self.m = m
        self.samples = [set(s) for s in samples]
        if not self.samples:
            raise ValueError("at least one sample active set is required")
        self._masks = None
        if m.n <= MASK_TABLE_MAX_N:
            self._masks = np.array([_to_mask(s) for s in self.samples], dtype=np.int64)

    def probabilities(self, N, S, candidates):
        if self._masks is not None:
            tables = _mask_tables(self.m)
            nmask = _to_mask(N)
            smask = _to_mask(S)
            present = (self._masks & nmask) | smask
            return {e: float(tables.spanned[present, e].mean()) for e in candidates}
        candidates = list(candidates)
        counts = {e: 0 for e in candidates}
        inv = 1.0 / len(self.samples)
        for sample in self.samples:
            present = (sample & N) | S
            for e in _spanned_candidates(self.m, present, candidates):
                counts[e] += 1
        return {e: counts[e] * inv for e in candidates}


class MonteCarloSpanOracle(SpanProbOracle):
    """Approximate oracle over fresh seeded draws of the active set."""

    def __init__(self, m: Matroid, x, draws: int, rng: np.random.Generator):
        x = np.asarray(x, dtype=float)
        coins = rng.random((draws, m.n)) < x[None, :]
        samples = [set(np.flatnonzero(row)) for row in coins]
        self._inner = EmpiricalSpanOracle(m, samples)

    def probabilities(self, N, S, candidates):
        return self._inner.probabilities(N, S, candidates)


# ---------------------------------------------------------------------------
# Protected-set selection
# ---------------------------------------------------------------------------


def select_protected(
    m: Matroid,
    oracle: SpanProbOracle,
    N,
    c: float,
    sequential: bool = False,
) -> set[int]:
    """Grow the protected set until no remaining element exceeds cutoff c.

    The result does not depend on the processing order: span probabilities
    only grow as the protected set grows, and the returned set is the
    unique minimal fixed point.  The default adds every above-cutoff
    element per round; sequential mode adds one element at a time in
    ascending id, for the order-invariance tests.
    """
    N = set(N)
    S: set[int] = set()
    while True:
        remaining = sorted(N - S)
        if not remaining:
            return S
        probs = oracle.probabilities(N, S, remaining)
        if sequential:
            added = False
            for e in remaining:
                if probs[e] > c:
                    S.add(e)
                    added = True
                    break
            if not added:
                return S
        else:
            newly = {e for e in remaining if probs[e] > c}
            if not newly:
                return S
            S |= newly


def select_exact(m: Matroid, x, N, c: float, sequential: bool = False) -> set[int]:
    return select_protected(m, ExactSpanOracle(m, x), N, c, sequential=sequential)


def select_sampled(m: Matroid, samples, N, c: float, sequential: bool = False) -> set[int]:
    return select_protected(m, EmpiricalSpanOracle(m, samples), N, c, sequential=sequential)


# ---------------------------------------------------------------------------
# Chain decomposition
# ---------------------------------------------------------------------------


@dataclass
class ChainDecomposition:
    """Nested protected layers, outermost first, empty set last."""

    layers: list[frozenset[int]]
    cutoffs: list[float]
    status: str = "ok"
    ranks: list[int] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.layers) - 1

    def layer_of(self, n: int) -> list[int]:
        """Index of the innermost layer containing each element."""
        out = [0] * n
        for idx in range(1, len(self.layers)):
            for e in self.layers[idx]:
                out[e] = idx
        return out

    def to_spec(self) -> dict:
        return {
            "layers": [sorted(layer) for layer in self.layers],
            "cutoffs": [float(c) for c in self.cutoffs],
            "status": self.status,
            "ranks": list(self.ranks),
        }

    @classmethod
    def from_spec(cls, spec: dict) -> "ChainDecomposition":
        return cls(
            layers=[frozenset(layer) for layer in spec["layers"]],
            cutoffs=[float(c) for c in spec["cutoffs"]],
            status=spec.get("status", "ok"),
            ranks=list(spec.get("ranks", [])),
        )


def decompose_exact(
    m: Matroid,
    x,
    c: float,
    b: float = 0.5,
    ell_max: int = 64,
) -> ChainDecomposition:
    """Chain decomposition with the exact span oracle.

    Asserts the rank-decay guarantee rank(next) < (b/c) * rank(current)
    each layer; a non-shrinking layer or depth overflow marks the
    decomposition failed (the usual cause is x outside b times the
    polytope).
    """
    oracle = ExactSpanOracle(m, x)
    layers = [frozenset(range(m.n))]
    cutoffs: list[float] = []
    ranks = [m.full_rank()]
    while layers[-1]:
        if len(layers) > ell_max:
            return ChainDecomposition(layers, cutoffs, status="failed: depth overflow", ranks=ranks)
        nxt = frozenset(select_protected(m, oracle, layers[-1], c))
        cutoffs.append(c)
        rank_next = m.rank(nxt)
        if nxt and rank_next >= (b / c) * ranks[-1]:
            layers.append(nxt)
            ranks.append(rank_next)
            return ChainDecomposition(
                layers, cutoffs, status="failed: rank decay violated", ranks=ranks
            )
        if nxt == layers[-1]:
            layers.append(nxt)
            ranks.append(rank_next)
            return ChainDecomposition(
                layers, cutoffs, status="failed: non-shrinking layer", ranks=ranks
            )
        layers.append(nxt)
        ranks.append(rank_next)
    return ChainDecomposition(layers, cutoffs, status="ok", ranks=ranks)


def decompose_sampled(
    m: Matroid,
    sample_source,
    params: OcrsParams,
    rng: np.random.Generator,
) -> ChainDecomposition:
    """Chain decomposition with fresh sample batches per layer.

    sample_source(count, layer_index) must return `count` fresh active
    sets; each batch is consumed by exactly one layer, so no sample is
    ever reused.  Each layer draws its own cutoff uniformly from the
    midpoint grid.
    """
    layers = [frozenset(range(m.n))]
    cutoffs: list[float] = []
    ranks: list[int] = []
    layer_idx = 0
    while layers[-1]:
        if len(layers) > params.ell_max:
            return ChainDecomposition(layers, cutoffs, status="failed: depth overflow", ranks=ranks)
        j = int(rng.integers(params.k))
        c_hat = params.midpoint(j)
        samples = sample_source(params.s, layer_idx)
        if samples is None or len(samples) < params.s:
            raise ValueError("sample source exhausted")
        nxt = frozenset(select_sampled(m, samples, layers[-1], c_hat))
        cutoffs.append(c_hat)
        if nxt == layers[-1]:
            layers.append(nxt)
            return ChainDecomposition(
                layers, cutoffs, status="failed: non-shrinking layer", ranks=ranks
            )
        layers.append(nxt)
        layer_idx += 1
    return ChainDecomposition(layers, cutoffs, status="ok", ranks=ranks)


# ---------------------------------------------------------------------------
# Layered online greedy
# ---------------------------------------------------------------------------


class LayeredGreedy:
    """Online acceptance over a chain decomposition.

    An arriving element in layer i is accepted iff it is active and not
    spanned by the layer's accepted elements together with layer i+1,
    i.e. greedy on the restriction to layer i contracted by layer i+1.
    Construction precomputes per-layer bases so each online query costs
    one incremental independence test.
    """

    def __init__(self, m: Matroid, decomp: ChainDecomposition):
        if decomp.status != "ok":
            raise ValueError("cannot run the online pass on a failed decomposition")
        self.m = m
        self.decomp = decomp
        self.layer_of = decomp.layer_of(m.n)
        # Basis of each inner layer, preloaded into fresh builders per run.
        self._inner_bases = [
            m.basis_of(decomp.layers[i + 1]) for i in range(decomp.depth)
        ]

    def run(self, active, order=None) -> set[int]:
        m = self.m
        if order is None:
            order = range(m.n)
        builders = []
        for basis in self._inner_bases:
            builder = m.make_builder()
            for e in basis:
                builder.add(e)
            builders.append(builder)
        active = set(active)
        accepted: set[int] = set()
        for e in order:
            if e not in active:
                continue
            i = self.layer_of[e]
            if i >= len(builders):
                raise RuntimeError("element outside every layer; decomposition is inconsistent")
            if builders[i].can_add(e):
                builders[i].add(e)
                accepted.add(e)
        return accepted


def run_layered_greedy(m: Matroid, decomp: ChainDecomposition, active, order=None) -> set[int]:
    """One-shot online pass; returns the accepted set (independent in m)."""
    return LayeredGreedy(m, decomp).run(active, order)
