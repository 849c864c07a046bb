"""Exchange values, quantile thresholds learned from samples, and activation.

For each element i, the exchange value tau_i is the smallest value among
the elements of the optimum-without-i that i can swap in for.  Thresholds
are empirical order statistics of tau_i over N independent sample vectors,
one threshold per geometric quantile level; an arriving element is then
activated with the probability attached to the bucket its value lands in.
All comparisons happen in tie-broken value space, so they are strict.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .matroid import Matroid, MatroidError, UniformMatroid
from .values import (
    INF_VALUE,
    ZERO_VALUE,
    TieBrokenValue,
    sample_matrix,
    vector_from_row,
)


def bucket_count(eps: float) -> int:
    """Number of finite threshold levels for accuracy parameter eps."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return max(int(math.floor(math.log(1.0 / eps) / math.log(1.0 + eps))), 0)


def activation_grid(eps: float) -> np.ndarray:
    """Activation probabilities p_k = eps*(1+eps)^k - eps^2 for 0 <= k < m."""
    m = bucket_count(eps)
    ks = np.arange(m)
    return eps * (1.0 + eps) ** ks - eps * eps


def default_sample_count(n: int, eps: float) -> int:
    """Default N for threshold learning; explicit Chernoff-style constant."""
    m = max(bucket_count(eps), 1)
    return int(math.ceil(48.0 * math.log(2.0 * n * m / eps) / eps**4))


def quantile_index(eps: float, k: int, count: int) -> int:
    """1-based order-statistic index of the k-th threshold among count samples."""
    return int(math.ceil(eps * (1.0 + eps) ** k * count))


# ---------------------------------------------------------------------------
# Exchange values
# ---------------------------------------------------------------------------


def compute_tau(m: Matroid, values, i: int) -> TieBrokenValue:
    """Exchange value of element i given everyone's values.

    Computes the greedy optimum over the other elements; if i extends it
    for free the result is the bottom sentinel (the dummy-element
    convention), otherwise the smallest value i can swap in for.
    """
    if not 0 <= i < m.n:
        raise MatroidError(f"element {i} outside ground set")
    if m.is_loop(i):
        raise MatroidError(f"element {i} is a loop; its exchange value is undefined")
    opt_rest = _greedy_excluding(m, values, i)
    return _tau_against(m, values, i, opt_rest)


def _greedy_excluding(m: Matroid, values, skip: int | None) -> list[int]:
    order = sorted(
        (e for e in range(m.n) if e != skip),
        key=lambda e: (-values[e][0], -values[e][1], e),
    )
    builder = m.make_builder()
    chosen = []
    for e in order:
        if builder.can_add(e):
            builder.add(e)
            chosen.append(e)
    return chosen


def _tau_against(m: Matroid, values, i: int, opt_rest: list[int]) -> TieBrokenValue:
    if m.is_independent(set(opt_rest) | {i}):
        return ZERO_VALUE
    base = set(opt_rest)
    best: TieBrokenValue | None = None
    for j in opt_rest:
        vj = values[j]
        if best is not None and vj >= best:
            continue
        if m.is_independent((base - {j}) | {i}):
            best = TieBrokenValue(*vj)
    if best is None:
        raise RuntimeError("no exchange candidate found; independence oracle is inconsistent")
    return best


def tau_vector(m: Matroid, values) -> list[TieBrokenValue]:
    """Exchange values of all elements for one value vector.

    The greedy optimum is computed once; it only needs recomputing for the
    elements it contains.
    """
    opt = _greedy_excluding(m, values, None)
    opt_set = set(opt)
    taus: list[TieBrokenValue] = [ZERO_VALUE] * m.n
    for i in range(m.n):
        if m.is_loop(i):
            raise MatroidError(f"element {i} is a loop; its exchange value is undefined")
        rest = _greedy_excluding(m, values, i) if i in opt_set else opt
        taus[i] = _tau_against(m, values, i, rest)
    return taus


def batch_tau(m: Matroid, base: np.ndarray, tie: np.ndarray):
    """Exchange values for a batch of value vectors; shape (count, n) each.

    Uniform matroids get a vectorized path (the exchange value is the r-th
    largest value among the other elements); everything else falls back to
    the per-vector oracle computation.
    """
    count, n = base.shape
    if isinstance(m, UniformMatroid):
        r = m.r
        if n - 1 < r or r == 0:
            # Everyone extends the optimum-without-them for free (or the
            # matroid has rank 0, which means loops and is rejected).
            if r == 0:
                raise MatroidError("rank-0 matroid has only loops")
            tau_b = np.zeros((count, n))
            tau_t = np.full((count, n), -np.inf)
            return tau_b, tau_t
        order = np.lexsort((tie, base), axis=1)  # ascending value per row
        rows = np.arange(count)[:, None]
        kth = order[:, n - r]  # r-th largest element index per row
        k1th = order[:, n - r - 1]  # (r+1)-th largest
        in_top_r = np.zeros((count, n), dtype=bool)
        in_top_r[rows, order[:, n - r :]] = True
        tau_b = np.where(in_top_r, base[rows, k1th[:, None]], base[rows, kth[:, None]])
        tau_t = np.where(in_top_r, tie[rows, k1th[:, None]], tie[rows, kth[:, None]])
        return tau_b, tau_t
    tau_b = np.empty((count, n))
    tau_t = np.empty((count, n))
    for s in range(count):
        taus = tau_vector(m, vector_from_row(base[s], tie[s]))
        tau_b[s] = [t.base for t in taus]
        tau_t[s] = [t.tiebreak for t in taus]
    return tau_b, tau_t


# ---------------------------------------------------------------------------
# Threshold tables
# ---------------------------------------------------------------------------


@dataclass
class ThresholdTable:
    """Per-element quantile thresholds plus the activation probability grid.

    thresholds[i] has one entry per finite level in nondecreasing order,
    with an infinite sentinel appended; probs[k] is the activation
    probability of the k-th bucket.
    """

    eps: float
    thresholds: list[list[TieBrokenValue]]
    probs: np.ndarray
    status: str = "ok"

    @property
    def n(self) -> int:
        return len(self.thresholds)

    @property
    def levels(self) -> int:
        return len(self.probs)

    def activation_probability(self, i: int, v) -> float:
        """Probability that value v activates element i; monotone in v."""
        row = self.thresholds[i]
        v = TieBrokenValue(*v)
        if v < row[0]:
            return 0.0
        # Largest finite k with row[k] <= v; the sentinel guarantees k < levels.
        lo, hi = 0, len(row) - 1
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if row[mid] <= v:
                lo = mid
            else:
                hi = mid
        return float(self.probs[lo]) if self.levels else 0.0

    def activate(self, values, rng: np.random.Generator) -> set[int]:
        """Independent activation coin per element."""
        coins = rng.random(self.n)
        return {
            i
            for i in range(self.n)
            if coins[i] < self.activation_probability(i, values[i])
        }

    def to_spec(self) -> dict:
        return {
            "eps": self.eps,
            "status": self.status,
            "probs": [float(p) for p in self.probs],
            "thresholds": [
                [[t.base, t.tiebreak] for t in row] for row in self.thresholds
            ],
        }

    @classmethod
    def from_spec(cls, spec: dict) -> "ThresholdTable":
        return cls(
            eps=spec["eps"],
            thresholds=[
                [TieBrokenValue(b, t) for b, t in row] for row in spec["thresholds"]
            ],
            probs=np.asarray(spec["probs"], dtype=float),
            status=spec.get("status", "ok"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_spec(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ThresholdTable":
        return cls.from_spec(json.loads(text))


def learn_thresholds(
    m: Matroid,
    dists,
    count: int,
    eps: float,
    rng: np.random.Generator,
) -> ThresholdTable:
    """Learn the threshold table from count i.i.d. sample vectors.

    The k-th threshold of element i is the ceil(eps*(1+eps)^k * count)-th
    smallest of its exchange values across the samples (no interpolation).
    The sample vectors are consumed here and never stored.
    """
    if count <= 0:
        raise ValueError("sample count must be positive")
    levels = bucket_count(eps)
    probs = activation_grid(eps)
    if levels == 0:
        table = ThresholdTable(
            eps=eps,
            thresholds=[[INF_VALUE] for _ in range(m.n)],
            probs=probs,
            status="degenerate: no finite threshold levels at this eps",
        )
        return table
    base, tie = sample_matrix(dists, rng, count)
    tau_b, tau_t = batch_tau(m, base, tie)
    thresholds: list[list[TieBrokenValue]] = []
    for i in range(m.n):
        order = np.lexsort((tau_t[:, i], tau_b[:, i]))
        row = []
        for k in range(levels):
            idx = quantile_index(eps, k, count)
            s = order[idx - 1]
            row.append(TieBrokenValue(float(tau_b[s, i]), float(tau_t[s, i])))
        row.append(INF_VALUE)
        thresholds.append(row)
    return ThresholdTable(eps=eps, thresholds=thresholds, probs=probs)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


@dataclass
class ThresholdDiagnostic:
    """Monte Carlo quantile estimates Pr[threshold > tau_i] per (i, k)."""

    estimates: np.ndarray  # shape (n, levels)
    band_low: np.ndarray  # per-k lower bound
    band_high: np.ndarray  # per-k upper bound
    all_in_band: bool
    trials: int


def good_threshold_diagnostic(
    m: Matroid,
    dists,
    table: ThresholdTable,
    trials: int,
    rng: np.random.Generator,
    mc_slack: float = 0.02,
) -> ThresholdDiagnostic:
    """Estimate each threshold's true quantile level against its target band.

    The target band per level k is [eps*(1+eps)^k - eps^2,
    eps*(1+eps)^k + eps^2], widened by mc_slack for Monte Carlo error.
    Infinite sentinel columns are excluded.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    eps = table.eps
    levels = table.levels
    base, tie = sample_matrix(dists, rng, trials)
    tau_b, tau_t = batch_tau(m, base, tie)
    estimates = np.zeros((m.n, levels))
    for i in range(m.n):
        for k in range(levels):
            t = table.thresholds[i][k]
            below = (tau_b[:, i] < t.base) | (
                (tau_b[:, i] == t.base) & (tau_t[:, i] < t.tiebreak)
            )
            estimates[i, k] = below.mean()
    centers = eps * (1.0 + eps) ** np.arange(levels)
    band_low = centers - eps * eps - mc_slack
    band_high = centers + eps * eps + mc_slack
    in_band = bool(
        np.all((estimates >= band_low[None, :]) & (estimates <= band_high[None, :]))
    ) if levels else True
    return ThresholdDiagnostic(
        estimates=estimates,
        band_low=band_low,
        band_high=band_high,
        all_in_band=in_band,
        trials=trials,
    )
