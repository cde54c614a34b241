"""DQN/DRQN: action selection law, targets, replay gating, target sync."""

import numpy as np
import pytest

from polylife.learners import DqnConfig, DqnLearner, Transition
from polylife.learners.dqn import q_targets


def small_cfg(**overrides):
    defaults = dict(hidden=8, replay_start=1, update_every=10**9, buffer_capacity=1000)
    defaults.update(overrides)
    return DqnConfig(**defaults)


def make_learner(seed=0, **overrides):
    return DqnLearner(4, 2, small_cfg(**overrides), np.random.default_rng(seed))


def push(learner, rng, n, reward=1.0, task=0, terminal=False):
    obs = np.zeros(4)
    for _ in range(n):
        learner.observe(obs, 0, reward, obs, terminal, False, task, rng)


class TestActionSelection:
    def test_greedy_when_epsilon_zero(self):
        learner = make_learner(exploration=0.0)
        learner.params.layers[-1]["b"][...] = [0.0, 1.0]
        rng = np.random.default_rng(1)
        obs = np.zeros(4)
        assert all(learner.act(obs, rng) == 1 for _ in range(200))

    def test_full_exploration_is_uniform(self):
        learner = make_learner(exploration=1.0)
        rng = np.random.default_rng(2)
        obs = np.zeros(4)
        draws = np.array([learner.act(obs, rng) for _ in range(100_000)])
        assert abs(draws.mean() - 0.5) < 0.02  # freq of action 1 within +-2%

    def test_greedy_frequency_at_published_exploration(self):
        # P(argmax) = 1 - eps + eps/|A| = 0.9 at eps = 0.2, |A| = 2
        learner = make_learner(exploration=0.2)
        learner.params.layers[-1]["b"][...] = [0.0, 1.0]
        rng = np.random.default_rng(3)
        obs = np.zeros(4)
        draws = np.array([learner.act(obs, rng) for _ in range(100_000)])
        assert abs((draws == 1).mean() - 0.9) < 0.01

    def test_argmax_ties_broken_uniformly(self):
        learner = make_learner(exploration=0.0)
        for layer in learner.params.layers:
            for arr in layer.values():
                arr[...] = 0.0  # all Q identical
        rng = np.random.default_rng(4)
        obs = np.zeros(4)
        draws = np.array([learner.act(obs, rng) for _ in range(20_000)])
        assert abs(draws.mean() - 0.5) < 0.02


class TestTargets:
    def test_bootstrap_arithmetic(self):
        assert q_targets([1.0], [False], [10.0], 0.99)[0] == pytest.approx(10.9)

    def test_terminal_cuts_bootstrap(self):
        assert q_targets([1.0], [True], [10.0], 0.99)[0] == 1.0

    def test_update_reduces_td_error_on_identical_batch(self):
        learner = make_learner(seed=5, batch_size=10, learning_rate=0.1)
        rng = np.random.default_rng(6)
        obs = np.array([0.1, -0.2, 0.3, 0.4])
        nxt = np.array([0.0, 0.1, -0.1, 0.2])
        push_t = Transition(obs, 1, 1.0, nxt, False, 0, 0)
        for _ in range(50):
            learner.buffer.insert(push_t, rng)

        def td_error():
            from polylife.nncore import forward

            q, _, _ = forward(learner.spec, learner.params, obs, want_tape=False)
            qn, _, _ = forward(learner.spec, learner.target_params, nxt, want_tape=False)
            return (q[1] - (1.0 + 0.99 * qn.max())) ** 2

        before = td_error()
        learner.update(rng)
        assert td_error() < before


class TestReplayGating:
    def test_no_learning_before_replay_start(self):
        learner = make_learner(seed=7, replay_start=100, update_every=1)
        rng = np.random.default_rng(8)
        snapshot = learner.params.to_vector()
        push(learner, rng, 99)
        assert np.array_equal(learner.params.to_vector(), snapshot)
        push(learner, rng, 10)
        assert not np.array_equal(learner.params.to_vector(), snapshot)

    def test_updates_per_cycle_multiplies_budget(self):
        single = make_learner(seed=20, update_every=4, updates_per_cycle=1)
        triple = make_learner(seed=20, update_every=4, updates_per_cycle=3)
        rng_a, rng_b = np.random.default_rng(21), np.random.default_rng(21)
        push(single, rng_a, 40)
        obs = np.zeros(4)
        for _ in range(40):
            triple.observe(obs, 0, 1.0, obs, False, False, 0, rng_b)
        assert triple.updates_done == 3 * single.updates_done > 0

    def test_target_changes_only_at_sync_steps(self):
        learner = make_learner(seed=9, target_sync_every=50, update_every=1, replay_start=1)
        rng = np.random.default_rng(10)
        init_target = learner.target_params.to_vector()
        push(learner, rng, 49)
        # params have trained away but the target still matches the init
        assert not np.array_equal(learner.params.to_vector(), init_target)
        assert np.array_equal(learner.target_params.to_vector(), init_target)
        push(learner, rng, 1)  # step 50: sync
        assert not np.array_equal(learner.target_params.to_vector(), init_target)


class TestRecurrent:
    def test_burn_in_only_buffer_never_updates(self):
        cfg = small_cfg(recurrent=True, batch_size=4, trace_length=5, update_every=10**9)
        learner = DqnLearner(4, 2, cfg, np.random.default_rng(11))
        rng = np.random.default_rng(12)
        learner.start_episode()
        obs = np.zeros(4)
        for _ in range(30):
            learner.observe(obs, 0, 0.5, obs, False, False, 0, rng, burn_in=True)
        snapshot = learner.params.to_vector()
        for _ in range(10):
            learner.update(rng)
        assert learner.updates_done == 0
        assert np.array_equal(learner.params.to_vector(), snapshot)

    def test_trace_update_learns_from_real_steps(self):
        cfg = small_cfg(recurrent=True, batch_size=4, trace_length=5, update_every=10**9)
        learner = DqnLearner(4, 2, cfg, np.random.default_rng(11))
        rng = np.random.default_rng(12)
        learner.start_episode()
        obs = np.zeros(4)
        for _ in range(30):
            learner.observe(obs, 0, 0.5, obs, False, False, 0, rng)
        snapshot = learner.params.to_vector()
        learner.update(rng)
        assert learner.updates_done == 1
        assert not np.array_equal(learner.params.to_vector(), snapshot)

    def test_recurrent_state_resets_per_episode(self):
        cfg = small_cfg(recurrent=True)
        learner = DqnLearner(4, 2, cfg, np.random.default_rng(13))
        learner.start_episode()
        rng = np.random.default_rng(14)
        learner.act(np.ones(4), rng)
        assert np.any(learner.rstate.h != 0.0)
        learner.start_episode()
        assert np.all(learner.rstate.h == 0.0)
