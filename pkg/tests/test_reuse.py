"""Policy selection law, lifetime statistics, and the control loop."""

import numpy as np
import pytest

from polylife.envs import make_cartpole_domain, make_task_sequences
from polylife.exceptions import ConfigurationError
from polylife.reuse import (
    PolicyRecord,
    ReuseConfig,
    RunLog,
    SelectorConfig,
    record_outcome,
    run_lifetime,
    run_single,
    select_policy,
    unadaptive_assignment,
)


def library_with_averages(averages_per_task):
    """Build records whose lifetime averages for task 0 equal the given values
    (None = never tried)."""
    library = []
    for i, avg in enumerate(averages_per_task):
        rec = PolicyRecord(i, learner=None, rng=None)
        if avg is not None:
            record_outcome(rec, 0, episode_return=avg * 10, steps=10)
        library.append(rec)
    return library


class TestAssignment:
    def test_single_policy_takes_all(self):
        assert set(unadaptive_assignment(10, 1, seed=0).values()) == {0}

    def test_one_to_one_is_bijection(self):
        mapping = unadaptive_assignment(12, 12, seed=1)
        assert sorted(mapping.keys()) == list(range(12))
        assert sorted(mapping.values()) == list(range(12))

    def test_balanced_loads(self):
        mapping = unadaptive_assignment(27, 4, seed=2)
        loads = sorted(
            [sum(1 for p in mapping.values() if p == k) for k in range(4)], reverse=True
        )
        assert loads == [7, 7, 7, 6]

    def test_too_many_policies_rejected(self):
        with pytest.raises(ConfigurationError):
            unadaptive_assignment(3, 4, seed=0)


class TestSelectPolicy:
    def test_greedy_picks_best(self):
        library = library_with_averages([5.0, 7.0])
        cfg = SelectorConfig(mode="adaptive", epsilon=0.0)
        rng = np.random.default_rng(0)
        assert all(select_policy(0, library, cfg, rng) == 1 for _ in range(50))

    def test_untried_policy_only_via_exploration(self):
        library = library_with_averages([5.0, 7.0, None])
        cfg = SelectorConfig(mode="adaptive", epsilon=0.12)
        rng = np.random.default_rng(1)
        n = 100_000
        picks = np.array([select_policy(0, library, cfg, rng) for _ in range(n)])
        freq_untried = (picks == 2).mean()
        expected = 0.12 / 3
        assert abs(freq_untried - expected) <= 3 * np.sqrt(expected * (1 - expected) / n)

    def test_first_selection_uniform(self):
        library = library_with_averages([None, None, None, None])
        cfg = SelectorConfig(mode="adaptive", epsilon=0.1)
        rng = np.random.default_rng(2)
        picks = np.array([select_policy(0, library, cfg, rng) for _ in range(40_000)])
        for k in range(4):
            assert abs((picks == k).mean() - 0.25) < 0.01

    def test_ties_broken_uniformly(self):
        library = library_with_averages([3.0, 3.0])
        cfg = SelectorConfig(mode="adaptive", epsilon=0.0)
        rng = np.random.default_rng(3)
        picks = np.array([select_policy(0, library, cfg, rng) for _ in range(20_000)])
        assert abs(picks.mean() - 0.5) < 0.02

    def test_argmax_invariant_to_positive_scaling(self):
        rng = np.random.default_rng(4)
        cfg = SelectorConfig(mode="adaptive", epsilon=0.0)
        base = [2.0, 5.0, 3.0]
        for scale in (0.1, 1.0, 40.0):
            library = library_with_averages([v * scale for v in base])
            assert select_policy(0, library, cfg, rng) == 1

    def test_unadaptive_consumes_no_randomness(self):
        mapping = unadaptive_assignment(5, 2, seed=5)
        cfg = SelectorConfig(mode="unadaptive", assignment=mapping)
        library = library_with_averages([1.0, 2.0])
        rng = np.random.default_rng(6)
        state_before = rng.bit_generator.state
        for task in range(5):
            assert select_policy(task, library, cfg, rng) == mapping[task]
        assert rng.bit_generator.state == state_before


class TestRecordOutcome:
    def test_single_sample_average(self):
        rec = PolicyRecord(0, None, None)
        record_outcome(rec, 3, episode_return=10.0, steps=10)
        assert rec.lifetime_average(3) == 1.0

    def test_running_mean_over_lifetime(self):
        rec = PolicyRecord(0, None, None)
        record_outcome(rec, 1, episode_return=0.0, steps=10)
        first_only = PolicyRecord(0, None, None)
        record_outcome(first_only, 1, episode_return=10.0, steps=10)
        record_outcome(rec, 1, episode_return=10.0, steps=10)
        assert rec.lifetime_average(1) == first_only.lifetime_average(1) / 2

    def test_episode_unit(self):
        rec = PolicyRecord(0, None, None)
        record_outcome(rec, 0, episode_return=-7.0, steps=1000, time_unit="episodes")
        assert rec.stats_for(0).time_used == 1
        assert rec.lifetime_average(0) == -7.0

    def test_updates_isolated_per_pair(self):
        rec = PolicyRecord(0, None, None)
        other = PolicyRecord(1, None, None)
        record_outcome(rec, 0, 5.0, 5)
        before = other.stats_for(0).cumulative_reward, rec.stats_for(1).cumulative_reward
        record_outcome(rec, 0, 99.0, 3)
        assert (other.stats_for(0).cumulative_reward, rec.stats_for(1).cumulative_reward) == before


DOMAIN = make_cartpole_domain(27)[:4]
for i, t in enumerate(DOMAIN):
    assert t.task_index == i


def tiny_sequence(n_blocks=4, block_length=2, seed=7):
    return make_task_sequences(4, 1, n_blocks, seed=seed, block_length=block_length)[0]


class TestRunLifetime:
    def test_library_ids_fixed_and_complete(self):
        cfg = ReuseConfig(
            n_policies=3,
            learner="uniform-random",
            selector=SelectorConfig(mode="adaptive", epsilon=0.5),
            block_unit="episodes",
        )
        log, library, _ = run_lifetime(DOMAIN, tiny_sequence(8), cfg, seed=1)
        assert {rec.policy_id for rec in library} == {0, 1, 2}
        assert {r.policy_id for r in log.rows} <= {0, 1, 2}

    def test_one_to_one_rows_match_tasks(self):
        mapping = {i: i for i in range(4)}
        cfg = ReuseConfig(
            n_policies=4,
            learner="uniform-random",
            selector=SelectorConfig(mode="unadaptive", assignment=mapping),
            block_unit="episodes",
        )
        log, _, _ = run_lifetime(DOMAIN, tiny_sequence(6), cfg, seed=2)
        assert all(r.policy_id == r.task_idx for r in log.rows)

    def test_same_seed_reproduces_log(self):
        cfg = ReuseConfig(
            n_policies=2,
            learner="dqn",
            learner_overrides={"hidden": 8, "replay_start": 20, "update_every": 4},
            selector=SelectorConfig(mode="adaptive", epsilon=0.2),
            block_unit="episodes",
        )
        a, _, _ = run_lifetime(DOMAIN, tiny_sequence(4), cfg, seed=3)
        b, _, _ = run_lifetime(DOMAIN, tiny_sequence(4), cfg, seed=3)
        assert a.rows == b.rows

    def test_degenerate_reduction_is_bit_identical(self):
        overrides = {"hidden": 8, "replay_start": 30, "update_every": 4,
                     "buffer_capacity": 500}
        cfg = ReuseConfig(
            n_policies=1,
            learner="dqn",
            learner_overrides=overrides,
            selector=SelectorConfig(mode="unadaptive", assignment={i: 0 for i in range(4)}),
            block_unit="episodes",
        )
        seq = tiny_sequence(6, block_length=3)
        reuse_log, _, _ = run_lifetime(DOMAIN, seq, cfg, seed=4)
        bare_log = run_single(DOMAIN, seq, "dqn", overrides, seed=4, block_unit="episodes")
        assert reuse_log.rows == bare_log.rows

    def test_buffers_stay_private_to_their_policy(self):
        # 1-to-1 assignment: every buffer holds only its own task's experience
        mapping = {i: i for i in range(4)}
        cfg = ReuseConfig(
            n_policies=4,
            learner="dqn",
            learner_overrides={"hidden": 8, "replay_start": 10**9},
            selector=SelectorConfig(mode="unadaptive", assignment=mapping),
            block_unit="episodes",
        )
        _, library, _ = run_lifetime(DOMAIN, tiny_sequence(8), cfg, seed=10)
        for rec in library:
            tasks = {t.task_index for t in rec.learner.buffer.contents()}
            assert tasks <= {rec.policy_id}
            assert len(rec.learner.buffer.contents()) > 0 or tasks == set()

    def test_step_budget_blocks_run_whole_episodes(self):
        cfg = ReuseConfig(
            n_policies=1,
            learner="uniform-random",
            selector=SelectorConfig(mode="unadaptive", assignment={i: 0 for i in range(4)}),
            block_unit="steps",
        )
        seq = tiny_sequence(3, block_length=100)
        log, _, _ = run_lifetime(DOMAIN, seq, cfg, seed=5)
        for b in range(3):
            steps = sum(r.steps for r in log.rows if r.block_idx == b)
            assert steps >= 100


class TestSpreadProbing:
    def test_engine_emits_spread_rows(self):
        cfg = ReuseConfig(
            n_policies=2,
            learner="dqn",
            learner_overrides={"hidden": 8, "replay_start": 10**9},
            selector=SelectorConfig(mode="adaptive", epsilon=0.5),
            block_unit="episodes",
            spread_every=2,
            spread_sample=50,
        )
        _, _, spread_rows = run_lifetime(DOMAIN, tiny_sequence(6), cfg, seed=8)
        assert len(spread_rows) == 3
        for block_idx, value in spread_rows:
            assert block_idx in (1, 3, 5)
            assert 0.0 <= value <= 1.0

    def test_spread_probing_off_by_default(self):
        cfg = ReuseConfig(
            n_policies=2,
            learner="uniform-random",
            selector=SelectorConfig(mode="adaptive", epsilon=0.5),
            block_unit="episodes",
        )
        _, _, spread_rows = run_lifetime(DOMAIN, tiny_sequence(4), cfg, seed=9)
        assert spread_rows == []


class TestRunLogCsv:
    def test_roundtrip(self, tmp_path):
        cfg = ReuseConfig(
            n_policies=2,
            learner="uniform-random",
            selector=SelectorConfig(mode="adaptive", epsilon=0.3),
            block_unit="episodes",
        )
        log, _, _ = run_lifetime(DOMAIN, tiny_sequence(5), cfg, seed=6)
        path = tmp_path / "seq.csv"
        log.to_csv(path)
        loaded = RunLog.from_csv(path)
        assert loaded.rows == log.rows
