"""Learner construction, the uniform-random baseline, and burn-in."""

from __future__ import annotations

import numpy as np

from ..exceptions import ConfigurationError
from .dqn import DqnConfig, DqnLearner
from .ppo import PpoConfig, PpoLearner

LEARNER_KINDS = ("dqn", "drqn", "ppo", "ppo-lstm", "uniform-random")


class UniformRandomLearner:
    """Acts uniformly at random and never learns; the reference baseline."""

    is_recurrent = False

    def __init__(self, obs_dim: int, action_count: int, rng=None):
        self.obs_dim = obs_dim
        self.action_count = action_count
        self.steps_seen = 0
        self.episode_id = -1

    def start_episode(self):
        self.episode_id += 1

    def advance_state(self, obs):
        pass

    def act(self, obs, rng: np.random.Generator) -> int:
        return int(rng.integers(self.action_count))

    def observe(self, obs, action, reward, next_obs, terminal, truncated,
                task_index, rng, burn_in=False):
        self.steps_seen += 1

    def end_episode(self, rng):
        pass


def make_learner(kind: str, obs_dim: int, action_count: int,
                 rng: np.random.Generator, overrides: dict | None = None):
    """Build a base-learner by condition name; overrides replace config fields."""
    overrides = dict(overrides or {})
    if kind == "uniform-random":
        return UniformRandomLearner(obs_dim, action_count)
    if kind in ("dqn", "drqn"):
        overrides.setdefault("recurrent", kind == "drqn")
        return DqnLearner(obs_dim, action_count, DqnConfig(**overrides), rng)
    if kind in ("ppo", "ppo-lstm"):
        if kind == "ppo-lstm":
            overrides.setdefault("recurrent", True)
            overrides.setdefault("epochs", 3)
            overrides.setdefault("update_every", 100)
        return PpoLearner(obs_dim, action_count, PpoConfig(**overrides), rng)
    raise ConfigurationError(f"unknown learner {kind!r}")


def burn_in(learner, env, task_index, obs, policy_rng, env_rng, n: int = 15):
    """Warm a recurrent learner's state with n uniform-random actions.

    The steps feed observations through the network, are stored flagged as
    burn-in (excluded from learning targets), and count towards the episode.
    No-op for non-recurrent learners.  Returns (obs, accumulated reward,
    steps taken, terminal, truncated).
    """
    if not learner.is_recurrent:
        return obs, 0.0, 0, False, False
    total = 0.0
    taken = 0
    terminal = truncated = False
    for _ in range(n):
        learner.advance_state(obs)
        action = int(policy_rng.integers(learner.action_count))
        next_obs, reward, terminal, truncated = env.step(action, env_rng)
        learner.observe(
            obs, action, reward, next_obs, terminal, truncated, task_index,
            policy_rng, burn_in=True,
        )
        total += reward
        taken += 1
        obs = next_obs
        if terminal:
            break
    return obs, total, taken, terminal, truncated
