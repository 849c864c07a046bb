"""Matroid oracles: concrete families, combinators, and exchange machinery.

Everything (rank, span, greedy, exchange) is derived from the independence
oracle alone, so the combinators (restriction, contraction, direct sum)
compose without per-family special cases.  Families that admit a cheap
incremental independence test (uniform, partition, graphic) provide a
specialized builder used on hot paths.
"""

from __future__ import annotations

import json
import numpy as np


class MatroidError(ValueError):
    """Invalid matroid construction or operation argument."""


# ---------------------------------------------------------------------------
# Incremental independence builders
# ---------------------------------------------------------------------------


class IndependenceBuilder:
    """Grow an independent set one element at a time.

    ``can_add`` must not mutate state; ``add`` requires ``can_add`` to be
    true for the same element.
    """

    def can_add(self, e: int) -> bool:
        raise NotImplementedError

    def add(self, e: int) -> None:
        raise NotImplementedError


class _GenericBuilder(IndependenceBuilder):
    def __init__(self, matroid: "Matroid"):
        self._m = matroid
        self._elems: set[int] = set()

    def can_add(self, e: int) -> bool:
        return self._m.is_independent(self._elems | {e})

    def add(self, e: int) -> None:
        self._elems.add(e)


class _CountBuilder(IndependenceBuilder):
    """Uniform matroid: independent iff cardinality <= r."""

    def __init__(self, r: int):
        self._r = r
        self._count = 0

    def can_add(self, e: int) -> bool:
        return self._count < self._r

    def add(self, e: int) -> None:
        self._count += 1


class _BlockCountBuilder(IndependenceBuilder):
    def __init__(self, block_of: np.ndarray, capacities: np.ndarray):
        self._block_of = block_of
        self._caps = capacities
        self._counts = np.zeros(len(capacities), dtype=np.int64)

    def can_add(self, e: int) -> bool:
        b = self._block_of[e]
        return self._counts[b] < self._caps[b]

    def add(self, e: int) -> None:
        self._counts[self._block_of[e]] += 1


class _ForestBuilder(IndependenceBuilder):
    """Graphic matroid: union-find over vertices, cycle test per edge."""

    def __init__(self, num_vertices: int, edges: list[tuple[int, int]]):
        self._edges = edges
        self._parent = list(range(num_vertices))

    def _find(self, v: int) -> int:
        parent = self._parent
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def can_add(self, e: int) -> bool:
        u, v = self._edges[e]
        return self._find(u) != self._find(v)

    def add(self, e: int) -> None:
        u, v = self._edges[e]
        self._parent[self._find(u)] = self._find(v)


class _MappedBuilder(IndependenceBuilder):
    """Relabel element ids before delegating to a parent builder."""

    def __init__(self, inner: IndependenceBuilder, mapping: list[int]):
        self._inner = inner
        self._map = mapping

    def can_add(self, e: int) -> bool:
        return self._inner.can_add(self._map[e])

    def add(self, e: int) -> None:
        self._inner.add(self._map[e])


class _DirectSumBuilder(IndependenceBuilder):
    def __init__(self, builders: list[IndependenceBuilder], part_of: list[int], local_id: list[int]):
        self._builders = builders
        self._part_of = part_of
        self._local_id = local_id

    def can_add(self, e: int) -> bool:
        return self._builders[self._part_of[e]].can_add(self._local_id[e])

    def add(self, e: int) -> None:
        self._builders[self._part_of[e]].add(self._local_id[e])


# ---------------------------------------------------------------------------
# Matroid base class
# ---------------------------------------------------------------------------


class Matroid:
    """Independence oracle over the ground set [0, n)."""

    n: int
    kind: str = "abstract"

    # --- primitive -------------------------------------------------------

    def _independent(self, elems: frozenset[int]) -> bool:
        raise NotImplementedError

    def make_builder(self) -> IndependenceBuilder:
        return _GenericBuilder(self)

    # --- derived operations ---------------------------------------------

    def _check_range(self, elems) -> None:
        for e in elems:
            if not (0 <= e < self.n):
                raise MatroidError(f"element {e} outside ground set [0, {self.n})")

    def is_independent(self, S) -> bool:
        elems = frozenset(S)
        self._check_range(elems)
        return self._independent(elems)

    def basis_of(self, S) -> list[int]:
        """A maximal independent subset of S (greedy in ascending id)."""
        elems = sorted(set(S))
        self._check_range(elems)
        builder = self.make_builder()
        basis = []
        for e in elems:
            if builder.can_add(e):
                builder.add(e)
                basis.append(e)
        return basis

    def rank(self, S) -> int:
        return len(self.basis_of(S))

    def full_rank(self) -> int:
        return self.rank(range(self.n))

    def span_contains(self, S, e: int) -> bool:
        """True iff adding e to S does not increase the rank."""
        elems = set(S)
        self._check_range(elems)
        self._check_range([e])
        if e in elems:
            return True
        builder = self.make_builder()
        for x in sorted(elems):
            if builder.can_add(x):
                builder.add(x)
        return not builder.can_add(e)

    def is_loop(self, e: int) -> bool:
        return not self.is_independent([e])

    # --- combinators ------------------------------------------------------

    def restrict(self, S) -> "Restriction":
        return Restriction(self, S)

    def contract(self, S) -> "Contraction":
        return Contraction(self, S)

    # --- serialization ----------------------------------------------------

    def to_spec(self) -> dict:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Concrete families
# ---------------------------------------------------------------------------


class UniformMatroid(Matroid):
    kind = "uniform"

    def __init__(self, n: int, r: int):
        if n < 0 or r < 0:
            raise MatroidError("uniform matroid needs n >= 0 and r >= 0")
        self.n = n
        self.r = min(r, n)

    def _independent(self, elems) -> bool:
        return len(elems) <= self.r

    def make_builder(self) -> IndependenceBuilder:
        return _CountBuilder(self.r)

    def to_spec(self) -> dict:
        return {"kind": "uniform", "n": self.n, "r": self.r}


class PartitionMatroid(Matroid):
    kind = "partition"

    def __init__(self, blocks: list[list[int]], capacities: list[int]):
        if len(blocks) != len(capacities):
            raise MatroidError("one capacity per block required")
        flat = [e for block in blocks for e in block]
        self.n = len(flat)
        if sorted(flat) != list(range(self.n)):
            raise MatroidError("blocks must partition [0, n)")
        if any(c < 0 for c in capacities):
            raise MatroidError("capacities must be nonnegative")
        self.blocks = [list(b) for b in blocks]
        self.capacities = list(capacities)
        self._block_of = np.zeros(self.n, dtype=np.int64)
        for b, block in enumerate(blocks):
            for e in block:
                self._block_of[e] = b
        self._caps = np.asarray(capacities, dtype=np.int64)

    def _independent(self, elems) -> bool:
        counts = np.zeros(len(self.blocks), dtype=np.int64)
        for e in elems:
            counts[self._block_of[e]] += 1
        return bool(np.all(counts <= self._caps))

    def make_builder(self) -> IndependenceBuilder:
        return _BlockCountBuilder(self._block_of, self._caps)

    def to_spec(self) -> dict:
        return {"kind": "partition", "blocks": self.blocks, "capacities": self.capacities}


class GraphicMatroid(Matroid):
    kind = "graphic"

    def __init__(self, num_vertices: int, edges: list[tuple[int, int]]):
        if num_vertices < 0:
            raise MatroidError("vertex count must be nonnegative")
        self.num_vertices = num_vertices
        self.edges = [(int(u), int(v)) for u, v in edges]
        for u, v in self.edges:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise MatroidError("edge endpoint outside vertex range")
        self.n = len(self.edges)

    def _independent(self, elems) -> bool:
        builder = self.make_builder()
        for e in elems:
            if not builder.can_add(e):
                return False
            builder.add(e)
        return True

    def make_builder(self) -> IndependenceBuilder:
        return _ForestBuilder(self.num_vertices, self.edges)

    def bridge_edges(self, edge_ids) -> set[int]:
        """Bridges of the subgraph formed by edge_ids (parallel edges ok).

        An edge of the subgraph lies on a cycle iff it is not a bridge;
        self-loops are never bridges.
        """
        edge_ids = list(edge_ids)
        adj: dict[int, list[tuple[int, int]]] = {}
        for eid in edge_ids:
            u, v = self.edges[eid]
            if u == v:
                continue
            adj.setdefault(u, []).append((v, eid))
            adj.setdefault(v, []).append((u, eid))
        bridges: set[int] = set()
        disc: dict[int, int] = {}
        low: dict[int, int] = {}
        timer = 0
        for start in adj:
            if start in disc:
                continue
            # Iterative DFS; entry edge id distinguishes parallel edges.
            stack = [(start, -1, iter(adj[start]))]
            disc[start] = low[start] = timer
            timer += 1
            while stack:
                v, in_edge, it = stack[-1]
                advanced = False
                for w, eid in it:
                    if eid == in_edge:
                        continue
                    if w not in disc:
                        disc[w] = low[w] = timer
                        timer += 1
                        stack.append((w, eid, iter(adj[w])))
                        advanced = True
                        break
                    low[v] = min(low[v], disc[w])
                if not advanced:
                    stack.pop()
                    if stack:
                        parent = stack[-1][0]
                        low[parent] = min(low[parent], low[v])
                        if low[v] > disc[parent]:
                            bridges.add(in_edge)
        return bridges

    def to_spec(self) -> dict:
        return {
            "kind": "graphic",
            "vertices": self.num_vertices,
            "edges": [list(e) for e in self.edges],
        }


class Restriction(Matroid):
    kind = "restriction"

    def __init__(self, parent: Matroid, subset):
        self.parent = parent
        self.parent_ids = sorted(set(subset))
        parent._check_range(self.parent_ids)
        self.n = len(self.parent_ids)

    def _independent(self, elems) -> bool:
        return self.parent.is_independent(self.parent_ids[e] for e in elems)

    def make_builder(self) -> IndependenceBuilder:
        return _MappedBuilder(self.parent.make_builder(), self.parent_ids)

    def to_spec(self) -> dict:
        return {
            "kind": "restriction",
            "parent": self.parent.to_spec(),
            "subset": list(self.parent_ids),
        }


class Contraction(Matroid):
    kind = "contraction"

    def __init__(self, parent: Matroid, subset):
        self.parent = parent
        self.contracted = sorted(set(subset))
        parent._check_range(self.contracted)
        self.parent_ids = [e for e in range(parent.n) if e not in set(self.contracted)]
        self.n = len(self.parent_ids)
        self._contracted_basis = parent.basis_of(self.contracted)
        self._contracted_rank = len(self._contracted_basis)

    def _independent(self, elems) -> bool:
        mapped = [self.parent_ids[e] for e in elems]
        if not self.parent.is_independent(mapped):
            return False
        joint = self.parent.rank(set(mapped) | set(self.contracted))
        return joint == len(mapped) + self._contracted_rank

    def make_builder(self) -> IndependenceBuilder:
        # Preloading a basis of the contracted set makes each incremental
        # add test exactly the contracted-rank increase condition.
        inner = self.parent.make_builder()
        for e in self._contracted_basis:
            inner.add(e)
        return _MappedBuilder(inner, self.parent_ids)

    def to_spec(self) -> dict:
        return {
            "kind": "contraction",
            "parent": self.parent.to_spec(),
            "subset": list(self.contracted),
        }


class DirectSum(Matroid):
    kind = "direct_sum"

    def __init__(self, parts: list[Matroid]):
        self.parts = list(parts)
        self.n = sum(p.n for p in parts)
        self._part_of: list[int] = []
        self._local_id: list[int] = []
        for idx, p in enumerate(parts):
            self._part_of.extend([idx] * p.n)
            self._local_id.extend(range(p.n))

    def _independent(self, elems) -> bool:
        groups: dict[int, set[int]] = {}
        for e in elems:
            groups.setdefault(self._part_of[e], set()).add(self._local_id[e])
        return all(self.parts[i].is_independent(g) for i, g in groups.items())

    def make_builder(self) -> IndependenceBuilder:
        return _DirectSumBuilder(
            [p.make_builder() for p in self.parts], self._part_of, self._local_id
        )

    def to_spec(self) -> dict:
        return {"kind": "direct_sum", "parts": [p.to_spec() for p in self.parts]}


def matroid_from_spec(spec: dict) -> Matroid:
    """Build a matroid from its JSON-compatible description."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise MatroidError("matroid spec must be an object with a 'kind' tag")
    kind = spec["kind"]
    try:
        if kind == "uniform":
            return UniformMatroid(spec["n"], spec["r"])
        if kind == "partition":
            return PartitionMatroid(spec["blocks"], spec["capacities"])
        if kind == "graphic":
            return GraphicMatroid(spec["vertices"], [tuple(e) for e in spec["edges"]])
        if kind == "restriction":
            return Restriction(matroid_from_spec(spec["parent"]), spec["subset"])
        if kind == "contraction":
            return Contraction(matroid_from_spec(spec["parent"]), spec["subset"])
        if kind == "direct_sum":
            return DirectSum([matroid_from_spec(p) for p in spec["parts"]])
    except KeyError as exc:
        raise MatroidError(f"matroid spec for kind={kind!r} missing field {exc}") from exc
    raise MatroidError(f"unknown matroid kind {kind!r}")


def matroid_from_json(text: str) -> Matroid:
    return matroid_from_spec(json.loads(text))


# ---------------------------------------------------------------------------
# Greedy and exchange machinery
# ---------------------------------------------------------------------------


def max_weight_basis(m: Matroid, weights) -> set[int]:
    """Max-weight independent set via greedy in descending weight order.

    ``weights`` is a sequence of lexicographically ordered (base, tiebreak)
    pairs; distinct tiebreakers make the result unique.  Greedy keeps going
    past zero-weight elements, so the result is always a basis.
    """
    if len(weights) != m.n:
        raise MatroidError(f"expected {m.n} weights, got {len(weights)}")
    for w in weights:
        if w[0] < 0:
            raise MatroidError("weights must be nonnegative")
    order = sorted(range(m.n), key=lambda i: (-weights[i][0], -weights[i][1], i))
    builder = m.make_builder()
    basis: set[int] = set()
    for e in order:
        if builder.can_add(e):
            builder.add(e)
            basis.add(e)
    return basis


def max_weight_basis_real(m: Matroid, weights) -> set[int]:
    """Greedy with plain real weights; ties broken by ascending element id."""
    return max_weight_basis(m, [(w, -i) for i, w in enumerate(weights)])


def _check_basis(m: Matroid, S, full_rank: int | None = None) -> None:
    S = set(S)
    if full_rank is None:
        full_rank = m.full_rank()
    if len(S) != full_rank or not m.is_independent(S):
        raise MatroidError("argument is not a basis")


def strong_exchange(m: Matroid, A, B, x: int) -> int:
    """Find y in B\\A with A-x+y and B-y+x both bases.

    Returns the first valid y in ascending element order.  A broken oracle
    (no valid y) raises RuntimeError, since existence is guaranteed for
    genuine matroids.
    """
    A, B = set(A), set(B)
    r = m.full_rank()
    _check_basis(m, A, r)
    _check_basis(m, B, r)
    if x not in A or x in B:
        raise MatroidError("x must lie in A \\ B")
    for y in sorted(B - A):
        if m.is_independent((A - {x}) | {y}) and m.is_independent((B - {y}) | {x}):
            return y
    raise RuntimeError("no valid exchange element found; independence oracle is inconsistent")


def monotone_exchange_bijection(m: Matroid, weights, A, B) -> dict[int, int]:
    """Weight-monotone bijection f: A -> B with B - f(x) + x a basis.

    A must be the greedy max-weight basis for ``weights`` (recomputed and
    verified).  The returned map satisfies w(f(x)) <= w(x) and f(x) = x on
    A & B.  Elements of A are processed from lightest to heaviest, each
    swapped into a working copy of A via a strong exchange against B.
    """
    A, B = set(A), set(B)
    if A != max_weight_basis(m, weights):
        raise MatroidError("A is not the greedy max-weight basis for the given weights")
    _check_basis(m, B, len(A))
    ascending = sorted(A, key=lambda e: (weights[e][0], weights[e][1], -e))
    current = set(A)
    f: dict[int, int] = {}
    for a in ascending:
        if a in current and a not in B:
            y = None
            for cand in sorted(B - current):
                if m.is_independent((current - {a}) | {cand}) and m.is_independent(
                    (B - {cand}) | {a}
                ):
                    y = cand
                    break
            if y is None:
                raise RuntimeError("strong exchange failed; independence oracle is inconsistent")
            f[a] = y
            current = (current - {a}) | {y}
        else:
            f[a] = a
    return f


# ---------------------------------------------------------------------------
# Exhaustive subset tables (small n only; exact test oracles)
# ---------------------------------------------------------------------------

MAX_ENUM_N = 20


def rank_table(m: Matroid) -> np.ndarray:
    """rank of every subset, indexed by bitmask; n <= 20 only."""
    if m.n > MAX_ENUM_N:
        raise MatroidError(f"exact enumeration unsupported for n > {MAX_ENUM_N}")
    size = 1 << m.n
    rank = np.zeros(size, dtype=np.int8)
    # basis_sets[mask] is a maximal independent subset of mask, built by
    # extending the basis of mask minus its lowest bit.
    basis_sets: list[tuple[int, ...]] = [()] * size
    for mask in range(1, size):
        low = mask & (-mask)
        e = low.bit_length() - 1
        prev = basis_sets[mask ^ low]
        if m.is_independent(prev + (e,)):
            basis_sets[mask] = prev + (e,)
            rank[mask] = rank[mask ^ low] + 1
        else:
            basis_sets[mask] = prev
            rank[mask] = rank[mask ^ low]
    return rank


def span_table(m: Matroid, ranks: np.ndarray | None = None) -> np.ndarray:
    """spanned[mask, e] = (e in span(mask - {e})); n <= 16 only."""
    if m.n > 16:
        raise MatroidError("span table supported only for n <= 16")
    if ranks is None:
        ranks = rank_table(m)
    size = 1 << m.n
    masks = np.arange(size, dtype=np.int64)
    spanned = np.empty((size, m.n), dtype=bool)
    for e in range(m.n):
        bit = 1 << e
        without = masks & ~bit
        spanned[:, e] = ranks[without | bit] == ranks[without]
    return spanned


def subset_sizes(n: int) -> np.ndarray:
    """Popcount of every mask in [0, 2^n)."""
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = np.zeros(1 << n, dtype=np.int8)
    for b in range(n):
        sizes += ((masks >> b) & 1).astype(np.int8)
    return sizes


def in_polytope(m: Matroid, x) -> bool:
    """Exact membership test for the independent-set polytope.

    Enumerates all subset constraints sum(x_S) <= rank(S); n <= 20 only.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (m.n,):
        raise MatroidError(f"expected vector of length {m.n}")
    if np.any(x < -1e-12) or np.any(x > 1 + 1e-12):
        raise MatroidError("entries must lie in [0, 1]")
    if m.n > MAX_ENUM_N:
        raise MatroidError(f"exact polytope test unsupported for n > {MAX_ENUM_N}")
    ranks = rank_table(m)
    masks = np.arange(1 << m.n)
    sums = np.zeros(1 << m.n)
    for e in range(m.n):
        sums[(masks & (1 << e)) != 0] += x[e]
    return bool(np.all(sums <= ranks + 1e-9))
