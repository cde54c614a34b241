"""Thin stateful adapter over the functional environment operations.

One Env instance per run; it owns the current episode state and exposes the
reset/step/observe cycle the learners and the reuse engine drive.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ConfigurationError
from . import cartpole, pocman
from .domains import TaskSpec


class Env:
    """Episode interface for a single task."""

    action_count: int
    obs_dim: int

    def __init__(self, task: TaskSpec):
        self.task = task
        self.state = None

    def reset(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def step(self, action: int, rng: np.random.Generator):
        """Returns (obs, reward, terminal, truncated).

        truncated means the episode ended only because of the step cutoff;
        learners treat such ends as non-terminal when bootstrapping.
        """
        raise NotImplementedError


class CartpoleEnv(Env):
    action_count = cartpole.CARTPOLE_ACTIONS
    obs_dim = 4

    def reset(self, rng):
        self.state = cartpole.cartpole_reset(self.task, rng)
        return cartpole.cartpole_observe(self.state)

    def step(self, action, rng):
        self.state, obs, reward, terminal = cartpole.cartpole_step(
            self.task, self.state, action
        )
        truncated = terminal and self.state.termination == "time-limit"
        return obs, reward, terminal, truncated


class PocmanEnv(Env):
    action_count = pocman.POCMAN_ACTIONS
    obs_dim = 11

    def reset(self, rng):
        self.state = pocman.pocman_reset(self.task, rng)
        return pocman.pocman_observe(self.task, self.state)

    def step(self, action, rng):
        self.state, obs, reward, terminal, = pocman.pocman_step(
            self.task, self.state, action, rng
        )
        # pocman has no terminal states; every episode end is a cutoff
        return obs, reward, terminal, terminal


def make_env(task: TaskSpec) -> Env:
    if task.domain == "cartpole":
        return CartpoleEnv(task)
    if task.domain == "pocman":
        return PocmanEnv(task)
    raise ConfigurationError(f"unknown domain {task.domain!r}")
