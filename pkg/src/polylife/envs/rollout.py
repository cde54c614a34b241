"""Uniform-random-policy rollouts with pre-termination statistics.

Used by the task-cluster analysis: for each cartpole task the rollout
records, per termination type (angle vs position), how often it occurred,
the pole's angular speed in the state the terminal step was taken from, and
the episode length.  The per-task clustering point is the minimum angular
speed over angle-terminations (the boundary of the unsafe region) together
with the mean length of angle-terminated episodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigurationError
from .cartpole import cartpole_reset, cartpole_step
from .domains import TaskSpec


@dataclass
class RolloutStats:
    task_index: int
    steps: int = 0
    episodes: int = 0
    angle_events: list = field(default_factory=list)  # (|theta_dot|, episode length)
    position_events: list = field(default_factory=list)

    @property
    def angle_count(self) -> int:
        return len(self.angle_events)

    @property
    def position_count(self) -> int:
        return len(self.position_events)

    @property
    def boundary_angular_speed(self) -> float | None:
        if not self.angle_events:
            return None
        return min(speed for speed, _ in self.angle_events)

    @property
    def mean_pretermination_length(self) -> float | None:
        if not self.angle_events:
            return None
        return float(np.mean([length for _, length in self.angle_events]))


def random_policy_rollout(
    task: TaskSpec, n_steps: int, rng: np.random.Generator
) -> RolloutStats:
    """Run a uniform-random policy for n_steps total environment steps."""
    if task.domain != "cartpole":
        raise ConfigurationError("random_policy_rollout supports cartpole tasks only")
    stats = RolloutStats(task_index=task.task_index)
    state = cartpole_reset(task, rng)
    while stats.steps < n_steps:
        prev = state
        state, _, _, terminal = cartpole_step(task, state, int(rng.integers(2)))
        stats.steps += 1
        if terminal:
            stats.episodes += 1
            if state.termination == "angle":
                stats.angle_events.append((abs(prev.theta_dot), state.steps))
            elif state.termination == "position":
                stats.position_events.append((abs(prev.theta_dot), state.steps))
            state = cartpole_reset(task, rng)
    return stats
