"""End-to-end policy training, online execution, and the optimum baseline."""

import numpy as np
import pytest

from sampled_prophet.matroid import UniformMatroid
from sampled_prophet.ocrs import OcrsParams
from sampled_prophet.prophet import ProphetPolicy, expected_opt, run_online, train
from sampled_prophet.rng import substream
from sampled_prophet.values import (
    BernoulliScaledDist,
    ConstantDist,
    Instance,
    TieBrokenValue,
    UniformDist,
    sample_vector,
)


def small_params(eps=0.2, s=200):
    return OcrsParams(
        eps=eps, k=2, cutoffs=np.linspace(0.5 + eps / 2, 0.5 + eps, 3), s=s, ell_max=10
    )


def rank1_instance(n=1):
    return Instance(UniformMatroid(max(n, 1), 1), [UniformDist()] * max(n, 1))


class TestTrain:
    def test_single_element_pipeline(self):
        policy = train(rank1_instance(1), eps=0.2, seed=3, threshold_samples=500,
                       params=small_params())
        assert policy.status == "ok"
        assert policy.table.n == 1
        assert all(np.isfinite(t.base) for t in policy.table.thresholds[0][:-1])

    def test_constant_values_binary_activation(self):
        inst = Instance(UniformMatroid(2, 1), [ConstantDist(2.0), ConstantDist(1.0)])
        policy = train(inst, eps=0.2, seed=5, threshold_samples=500, params=small_params())
        allowed = [0.0] + [float(p) for p in policy.table.probs]
        for i in range(2):
            p = policy.table.activation_probability(i, TieBrokenValue(2.0, 0.5))
            assert any(p == pytest.approx(a) for a in allowed)

    def test_serialized_policy_reproducible(self):
        inst = rank1_instance(3)
        a = train(inst, eps=0.2, seed=11, threshold_samples=800, params=small_params())
        b = train(inst, eps=0.2, seed=11, threshold_samples=800, params=small_params())
        assert a.to_json() == b.to_json()

    def test_sample_accounting(self):
        policy = train(rank1_instance(2), eps=0.2, seed=1, threshold_samples=600,
                       params=small_params(s=150))
        assert policy.threshold_samples == 600
        assert policy.ocrs_samples == 150 * policy.decomp.depth
        assert policy.total_samples == 600 + policy.ocrs_samples

    def test_bad_eps_rejected(self):
        with pytest.raises(ValueError):
            train(rank1_instance(2), eps=0.3, seed=1)

    def test_policy_file_roundtrip(self):
        policy = train(rank1_instance(2), eps=0.2, seed=2, threshold_samples=400,
                       params=small_params())
        again = ProphetPolicy.from_json(policy.to_json())
        assert again.to_json() == policy.to_json()


class TestRunOnline:
    def test_value_below_thresholds_never_accepted(self):
        policy = train(rank1_instance(2), eps=0.2, seed=7, threshold_samples=800,
                       params=small_params())
        values = [TieBrokenValue(0.0, 0.0), TieBrokenValue(0.0, 0.0)]
        accepted, total = run_online(policy, values, substream(1, "t"))
        assert accepted == set() and total == 0.0

    def test_failed_policy_accepts_nothing(self):
        policy = train(rank1_instance(2), eps=0.2, seed=7, threshold_samples=400,
                       params=small_params())
        policy.status = "decomposition failed: test"
        accepted, total = run_online(policy, sample_vector(rank1_instance(2), substream(2, "v")),
                                     substream(2, "t"))
        assert accepted == set() and total == 0.0

    def test_accepted_set_independent(self):
        inst = Instance(UniformMatroid(5, 2), [UniformDist()] * 5)
        policy = train(inst, eps=0.2, seed=9, threshold_samples=800, params=small_params())
        for t in range(200):
            rng = substream(77, "trial", t)
            values = sample_vector(inst, rng)
            accepted, total = run_online(policy, values, rng)
            assert inst.matroid.is_independent(accepted)
            assert total == pytest.approx(sum(values[e].base for e in accepted))

    def test_raising_value_never_removes_acceptance(self):
        # Coupled coins: the same rng draws, higher value, weakly more accepted.
        policy = train(rank1_instance(1), eps=0.2, seed=13, threshold_samples=800,
                       params=small_params())
        for t in range(100):
            lo = [TieBrokenValue(0.3, 0.5)]
            hi = [TieBrokenValue(0.9, 0.5)]
            acc_lo, _ = run_online(policy, lo, substream(5, "c", t))
            acc_hi, _ = run_online(policy, hi, substream(5, "c", t))
            assert acc_lo <= acc_hi


class TestExpectedOpt:
    def test_constant_values_zero_stderr(self):
        inst = Instance(UniformMatroid(2, 1), [ConstantDist(3.0), ConstantDist(1.0)])
        mean, stderr = expected_opt(inst, 50, substream(1, "o"))
        assert mean == pytest.approx(3.0)
        assert stderr == pytest.approx(0.0)

    def test_max_of_two_coins(self):
        inst = Instance(UniformMatroid(2, 1), [BernoulliScaledDist(1.0, 0.5)] * 2)
        mean, stderr = expected_opt(inst, 40_000, substream(2, "o"))
        assert mean == pytest.approx(0.75, abs=3 * stderr + 1e-9)

    def test_full_rank_sum_linearity(self):
        inst = Instance(UniformMatroid(2, 2), [BernoulliScaledDist(1.0, 0.5)] * 2)
        mean, _ = expected_opt(inst, 40_000, substream(3, "o"))
        assert mean == pytest.approx(1.0, abs=0.02)
