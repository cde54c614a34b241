"""Lifetime loop on the partially observable domain: recurrent learners,
burn-in, and episode-unit accounting."""

import numpy as np

from polylife.envs import make_pocman_domain, make_task_sequences
from polylife.envs.pocman import POCMAN_EPISODE_STEPS
from polylife.reuse import ReuseConfig, SelectorConfig, run_lifetime

DOMAIN = make_pocman_domain()


def pocman_sequence(n_blocks, episodes_per_block, seed=3):
    return make_task_sequences(
        18, 1, n_blocks, seed=seed, block_length=episodes_per_block
    )[0]


def test_drqn_lifetime_episode_accounting():
    cfg = ReuseConfig(
        n_policies=2,
        learner="drqn",
        learner_overrides={
            "hidden": 8,
            "replay_start": 500,
            "update_every": 250,
            "batch_size": 4,
        },
        selector=SelectorConfig(mode="adaptive", epsilon=0.2),
        time_unit="episodes",
        block_unit="episodes",
    )
    log, library, _ = run_lifetime(DOMAIN, pocman_sequence(3, 1), cfg, seed=5)
    assert len(log.rows) == 3  # one episode per block
    for row in log.rows:
        assert row.steps == POCMAN_EPISODE_STEPS
    # t_ij counts episodes on this domain
    used = sum(rec.stats_for(t).time_used for rec in library for t in range(18))
    assert used == 3
    # at least one policy trained (updates happen every 250 steps)
    assert any(rec.learner.updates_done > 0 for rec in library)


def test_ppo_lstm_lifetime_runs_and_updates():
    cfg = ReuseConfig(
        n_policies=2,
        learner="ppo-lstm",
        learner_overrides={"hidden": 8, "epochs": 2, "update_every": 100,
                           "batch_size": 34},
        selector=SelectorConfig(mode="adaptive", epsilon=0.2),
        time_unit="episodes",
        block_unit="episodes",
    )
    log, library, _ = run_lifetime(DOMAIN, pocman_sequence(2, 1), cfg, seed=6)
    assert len(log.rows) == 2
    assert sum(rec.learner.updates_done for rec in library) >= 2
    # returns are bounded by the touch reward magnitude
    for row in log.rows:
        assert -POCMAN_EPISODE_STEPS <= row.episode_return <= POCMAN_EPISODE_STEPS


def test_burn_in_steps_counted_in_episode():
    cfg = ReuseConfig(
        n_policies=1,
        learner="drqn",
        learner_overrides={"hidden": 8, "replay_start": 10**9},
        selector=SelectorConfig(mode="unadaptive",
                                assignment={i: 0 for i in range(18)}),
        time_unit="episodes",
        block_unit="episodes",
    )
    log, library, _ = run_lifetime(DOMAIN, pocman_sequence(1, 1), cfg, seed=7)
    assert log.rows[0].steps == POCMAN_EPISODE_STEPS
    buffer_rows = library[0].learner.buffer.contents()
    assert sum(1 for t in buffer_rows if t.burn_in) == 15
    assert len(buffer_rows) == POCMAN_EPISODE_STEPS
