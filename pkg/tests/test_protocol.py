import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noonsim import analytics
from noonsim.protocol import (
    MemoryPool,
    ProtocolConfig,
    aggregate,
    pair_and_attempt,
    run_many,
    run_protocol,
    run_protocol_stepwise,
    run_rng,
)


class FixedDraw:
    """Stand-in generator returning a fixed uniform."""

    def __init__(self, u):
        self.u = u

    def random(self):
        return self.u

    def hypergeometric(self, ngood, nbad, nsample):
        raise AssertionError("not needed for two stored states")


class TestPairAndAttempt:
    def test_clean_accept(self):
        pool, rec = pair_and_attempt(MemoryPool({1: (2, 0)}), 1, FixedDraw(0.1), 0.25)
        assert pool.inventory == {1: (0, 0), 2: (1, 0)}
        assert rec.accepted and not rec.false_accept and not rec.output_corrupt

    def test_corrupt_input_propagates(self):
        pool, rec = pair_and_attempt(MemoryPool({1: (1, 1)}), 1, FixedDraw(0.1), 0.25)
        assert pool.total(1) == 0
        assert pool.inventory[2] == (0, 1)
        assert rec.corrupt_inputs == 1 and rec.output_corrupt

    def test_failure(self):
        pool, rec = pair_and_attempt(MemoryPool({1: (2, 0)}), 1, FixedDraw(0.9), 0.25)
        assert pool.inventory == {1: (0, 0)}
        assert not rec.accepted

    def test_false_accept(self):
        pool, rec = pair_and_attempt(MemoryPool({4: (2, 0)}), 4, FixedDraw(0.3), 0.25, 0.35)
        assert rec.accepted and rec.false_accept
        assert pool.inventory[8] == (0, 1)

    def test_insufficient_inventory(self):
        with pytest.raises(ValueError):
            pair_and_attempt(MemoryPool({1: (1, 0)}), 1, np.random.default_rng(0), 0.25)
        with pytest.raises(ValueError):
            pair_and_attempt(MemoryPool(), 2, np.random.default_rng(0), 0.25)

    def test_pair_choice_is_hypergeometric(self):
        rng = np.random.default_rng(11)
        counts = np.zeros(3)
        for _ in range(4000):
            _, rec = pair_and_attempt(MemoryPool({1: (3, 2)}), 1, rng, 0.0)
            counts[rec.corrupt_inputs] += 1
        # C(3,2), 3*2, C(2,2) over C(5,2)
        expected = np.array([0.3, 0.6, 0.1]) * 4000
        assert np.all(np.abs(counts - expected) < 4 * np.sqrt(expected))

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            MemoryPool().with_counts(1, -1, 0)


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"target_n": 3},
            {"target_n": 1},
            {"target_n": 4, "eta": 1.5},
            {"target_n": 4, "target_count": 0},
            {"target_n": 4, "initial_level": 3},
            {"target_n": 2, "initial_level": 2},
            {"target_n": 4, "seed": -1},
            {"target_n": 4, "initial_level": 2, "max_singles": 1},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ProtocolConfig(**kwargs)

    def test_levels(self):
        assert ProtocolConfig(16).merge_levels == [1, 2, 4, 8]
        assert ProtocolConfig(16, initial_level=2).merge_levels == [2, 4, 8]
        assert ProtocolConfig(16, initial_level=2).singles_per_injection == 2


def test_run_rng_is_per_run_stream():
    a = run_rng(5, 3).random(4)
    assert np.array_equal(a, run_rng(5, 3).random(4))
    assert not np.array_equal(a, run_rng(5, 4).random(4))


@pytest.mark.parametrize("engine", [run_protocol, run_protocol_stepwise])
def test_deterministic(engine):
    cfg = ProtocolConfig(8, target_count=3, eta=0.9, seed=42)
    assert engine(cfg, 2) == engine(cfg, 2)
    assert engine(cfg, 2) != engine(cfg, 3)


@settings(max_examples=25, deadline=None)
@given(
    st.sampled_from([2, 4, 8, 16]),
    st.integers(1, 5),
    st.sampled_from([1.0, 0.9, 0.5]),
    st.integers(0, 2**32),
    st.booleans(),
)
def test_ledger_balances(target, count, eta, seed, hom):
    level = 2 if hom and target > 2 else 1
    cfg = ProtocolConfig(target, count, eta, seed, initial_level=level)
    for engine in (run_protocol, run_protocol_stepwise):
        stats = engine(cfg)
        stats.check_ledger()
        assert stats.final_total == count
        assert not stats.budget_exhausted
        for lvl in cfg.merge_levels:
            assert stats.false_accepts[lvl] <= stats.tn_successes[lvl] <= stats.tn_attempts[lvl]
        # the run stops on the injection that completed the last target cat
        assert all(stats.leftover.total(lvl) <= 1 for lvl in cfg.merge_levels)


def test_perfect_detectors_never_corrupt():
    for stats in run_many(ProtocolConfig(16, 5, 1.0, seed=9), 20):
        assert stats.final_corrupt == 0
        assert sum(stats.false_accepts.values()) == 0


def test_budget_exhaustion_is_reported():
    cfg = ProtocolConfig(16, 1, seed=1, max_singles=50)
    for engine in (run_protocol, run_protocol_stepwise):
        stats = engine(cfg)
        assert stats.budget_exhausted
        assert stats.singles_consumed == 50
        assert stats.final_total == 0
        stats.check_ledger()


def test_engines_agree_in_distribution():
    cfg = ProtocolConfig(8, 1, 0.9, seed=3)
    fast = aggregate(run_many(cfg, 1500))
    slow = aggregate(run_many(cfg, 1500, engine=run_protocol_stepwise))
    diff = fast.mean_singles - slow.mean_singles
    assert abs(diff) < 4 * math.hypot(fast.se_singles, slow.se_singles)
    for lvl in cfg.merge_levels:
        a, b = fast.levels[lvl], slow.levels[lvl]
        assert abs(a.success_rate - b.success_rate) < 4 * math.hypot(a.success_rate_se, b.success_rate_se)


def test_aggregate_single_run():
    stats = run_protocol(ProtocolConfig(4, 2, seed=5))
    summary = aggregate([stats])
    assert summary.runs == 1
    assert summary.mean_singles == stats.singles_consumed
    assert summary.mean_singles_per_cat == stats.singles_consumed / 2
    assert summary.se_singles == 0 and summary.se_singles_per_cat == 0
    assert not summary.standard_errors_defined
    assert summary.levels[1].attempts == stats.tn_attempts[1]
    d = summary.to_dict()
    assert d["standard_errors_defined"] is False
    assert d["corrupt_input_accept_model"] == "same_as_clean"


def test_aggregate_empty():
    with pytest.raises(ValueError):
        aggregate([])


def test_target2_mean_singles_and_rate():
    summary = aggregate(run_many(ProtocolConfig(2, 1, seed=2024), 10_000))
    assert abs(summary.mean_singles - 8) <= 3 * summary.se_singles
    lvl = summary.levels[1]
    assert abs(lvl.success_rate - 0.25) <= 3 * lvl.success_rate_se


def test_target4_mean_per_cat():
    summary = aggregate(run_many(ProtocolConfig(4, 100, seed=7), 1000))
    assert summary.mean_singles_per_cat == pytest.approx(256 / 3, rel=0.05)
    assert summary.to_dict()["expected_singles_per_cat"] == pytest.approx(256 / 3)


def test_level_success_rates_match_exact():
    summary = aggregate(run_many(ProtocolConfig(16, 2, seed=77), 300))
    for n, lvl in summary.levels.items():
        p = float(analytics.exact_p_tn(n))
        assert abs(lvl.success_rate - p) <= 3.5 * math.sqrt(p * (1 - p) / lvl.attempts)


def test_corruption_non_increasing_in_eta():
    fractions = []
    for eta in (0.8, 0.9, 0.95, 1.0):
        summary = aggregate(run_many(ProtocolConfig(8, 20, eta, seed=13), 200))
        fractions.append(summary.corruption_fraction)
    assert fractions[-1] == 0
    assert all(a >= b for a, b in zip(fractions, fractions[1:]))


def test_false_accept_rate_matches_analytics():
    summary = aggregate(run_many(ProtocolConfig(8, 20, 0.9, seed=99), 300))
    for n, lvl in summary.levels.items():
        q = analytics.false_accept_fraction(n, 0.9)
        assert abs(lvl.false_accept_rate - q) <= 3 * math.sqrt(q * (1 - q) / lvl.successes)


def test_hom_start_quarter_cost():
    expected = analytics.expected_pool_sequence(8)
    m = dict(expected)
    assert m[1] / (2 * m[2]) == Fraction(4)
    lvl1 = aggregate(run_many(ProtocolConfig(8, 5, seed=1), 400))
    lvl2 = aggregate(run_many(ProtocolConfig(8, 5, seed=1, initial_level=2), 400))
    assert lvl1.mean_singles / lvl2.mean_singles == pytest.approx(4, rel=0.06)
