"""Independence oracles, rank, span, combinators, greedy, and exchanges."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sampled_prophet.matroid import (
    DirectSum,
    GraphicMatroid,
    MatroidError,
    PartitionMatroid,
    UniformMatroid,
    in_polytope,
    matroid_from_spec,
    max_weight_basis,
    max_weight_basis_real,
    monotone_exchange_bijection,
    rank_table,
    strong_exchange,
)
from sampled_prophet.values import TieBrokenValue

from conftest import all_subsets, brute_force_rank, random_matroid, random_values


def tb(*bases):
    return [TieBrokenValue(float(b), 0.5) for b in bases]


def triangle():
    return GraphicMatroid(3, [(0, 1), (1, 2), (2, 0)])


class TestIndependence:
    def test_uniform_small_subset(self):
        assert UniformMatroid(4, 2).is_independent({0, 1})

    def test_uniform_oversized_subset(self):
        assert not UniformMatroid(4, 2).is_independent({0, 1, 2})

    def test_graphic_cycle_dependent(self):
        assert not triangle().is_independent({0, 1, 2})

    def test_graphic_forest_independent(self):
        assert triangle().is_independent({0, 1})

    def test_partition_one_per_block(self):
        m = PartitionMatroid([[0, 1], [2, 3]], [1, 1])
        assert m.is_independent({0, 2})
        assert not m.is_independent({0, 1})

    def test_out_of_range_element(self):
        with pytest.raises(MatroidError):
            UniformMatroid(3, 2).is_independent({0, 5})

    def test_empty_always_independent(self, rng):
        for _ in range(20):
            assert random_matroid(rng).is_independent(set())


class TestRankAndSpan:
    def test_uniform_rank_caps(self):
        assert UniformMatroid(5, 3).rank({0, 1, 2, 3}) == 3

    def test_triangle_full_rank(self):
        assert triangle().rank({0, 1, 2}) == 2

    def test_empty_rank(self, rng):
        assert random_matroid(rng).rank(set()) == 0

    def test_rank_matches_brute_force(self, rng):
        for _ in range(25):
            m = random_matroid(rng, max_n=7)
            for S in all_subsets(m.n):
                assert m.rank(S) == brute_force_rank(m, S)

    def test_rank_one_spans_everything(self):
        m = UniformMatroid(3, 1)
        assert m.span_contains({0}, 2)

    def test_cycle_closure_spanned(self):
        assert triangle().span_contains({0, 1}, 2)

    def test_nothing_spanned_by_empty(self, rng):
        for _ in range(10):
            m = random_matroid(rng)
            for e in range(m.n):
                if not m.is_loop(e):
                    assert not m.span_contains(set(), e)


class TestCombinators:
    def test_contract_uniform_by_singleton(self):
        m = UniformMatroid(4, 2).contract({0})
        # Rank-1 structure on the remaining three elements.
        for S in all_subsets(3):
            assert m.is_independent(S) == (len(S) <= 1)

    def test_restrict_triangle_to_one_edge(self):
        m = triangle().restrict({0})
        assert m.n == 1
        assert m.is_independent({0})

    def test_contract_by_empty_is_identity(self, rng):
        for _ in range(10):
            base = random_matroid(rng, max_n=6)
            m = base.contract(set())
            for S in all_subsets(base.n):
                assert m.is_independent(S) == base.is_independent(S)

    def test_direct_sum_blocks_independent(self):
        m = DirectSum([UniformMatroid(2, 1), UniformMatroid(2, 2)])
        assert m.is_independent({0, 2, 3})
        assert not m.is_independent({0, 1})

    def test_spec_roundtrip(self, rng):
        for _ in range(10):
            m = random_matroid(rng, max_n=6)
            m2 = matroid_from_spec(m.to_spec())
            for S in all_subsets(m.n):
                assert m.is_independent(S) == m2.is_independent(S)


class TestMaxWeightBasis:
    def test_rank_one_takes_max(self):
        m = UniformMatroid(3, 1)
        assert max_weight_basis(m, tb(5, 3, 2)) == {0}

    def test_triangle_drops_lightest_cycle_edge(self):
        assert max_weight_basis(triangle(), tb(3, 2, 1)) == {0, 1}

    def test_partition_respects_caps(self):
        m = PartitionMatroid([[0, 1], [2]], [1, 1])
        assert max_weight_basis(m, tb(1, 9, 4)) == {1, 2}

    def test_returns_a_basis_even_past_zero(self):
        m = UniformMatroid(3, 2)
        basis = max_weight_basis(m, tb(5, 0, 0))
        assert len(basis) == 2

    def test_real_weights_tie_by_index(self):
        m = UniformMatroid(3, 1)
        assert max_weight_basis_real(m, [2.0, 2.0, 1.0]) == {0}

    def test_matches_enumeration(self, rng):
        for _ in range(30):
            m = random_matroid(rng, max_n=7)
            values = random_values(rng, m.n)
            got = max_weight_basis(m, values)
            best = max(
                (S for S in all_subsets(m.n) if m.is_independent(S)),
                key=lambda S: sum(values[e].base for e in S),
            )
            assert sum(values[e].base for e in got) == pytest.approx(
                sum(values[e].base for e in best)
            )


class TestExchanges:
    def test_uniform_swap_any(self):
        m = UniformMatroid(4, 2)
        y = strong_exchange(m, {0, 1}, {2, 3}, 0)
        assert y in {2, 3}

    def test_invalid_basis_rejected(self):
        m = UniformMatroid(4, 2)
        with pytest.raises(MatroidError):
            strong_exchange(m, {0}, {2, 3}, 0)

    def test_identity_map_when_bases_equal(self, rng):
        for _ in range(10):
            m = random_matroid(rng, max_n=6)
            values = random_values(rng, m.n)
            A = max_weight_basis(m, values)
            f = monotone_exchange_bijection(m, values, A, A)
            assert f == {a: a for a in A}

    def test_bijection_uniform_example(self):
        m = UniformMatroid(4, 2)
        w = tb(4, 3, 2, 1)
        f = monotone_exchange_bijection(m, w, {0, 1}, {2, 3})
        assert sorted(f.values()) == [2, 3]
        assert w[f[0]] <= w[0] and w[f[1]] <= w[1]

    def test_non_optimal_basis_rejected(self):
        m = UniformMatroid(4, 2)
        with pytest.raises(MatroidError):
            monotone_exchange_bijection(m, tb(4, 3, 2, 1), {2, 3}, {0, 1})


class TestPolytope:
    def test_rank_one_boundary_inside(self):
        assert in_polytope(UniformMatroid(2, 1), [0.5, 0.5])

    def test_rank_one_overfull_outside(self):
        assert not in_polytope(UniformMatroid(2, 1), [0.6, 0.6])

    def test_zero_vector_inside(self, rng):
        m = random_matroid(rng)
        assert in_polytope(m, np.zeros(m.n))

    def test_graphic_subcycle_constraint(self):
        # Sum over the triangle (rank 2) is what binds, not the total rank.
        m = GraphicMatroid(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
        assert not in_polytope(m, [0.7, 0.7, 0.7, 0.1])
        assert in_polytope(m, [0.6, 0.6, 0.6, 0.9])


class TestRankTable:
    def test_matches_rank_calls(self, rng):
        for _ in range(10):
            m = random_matroid(rng, max_n=6)
            table = rank_table(m)
            for S in all_subsets(m.n):
                mask = sum(1 << e for e in S)
                assert table[mask] == m.rank(S)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), st.integers(1, 7), st.data())
def test_uniform_downward_closed(n, r, data):
    m = UniformMatroid(n, min(r, n))
    S = data.draw(st.sets(st.integers(0, n - 1)))
    if m.is_independent(S) and S:
        drop = data.draw(st.sampled_from(sorted(S)))
        assert m.is_independent(S - {drop})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_matroid_exchange_axiom(seed):
    rng = np.random.default_rng(seed)
    m = random_matroid(rng, max_n=6)
    indep = [S for S in all_subsets(m.n) if m.is_independent(S)]
    for I in indep:
        for J in indep:
            if len(J) == len(I) + 1:
                assert any(m.is_independent(I | {e}) for e in J - I)
