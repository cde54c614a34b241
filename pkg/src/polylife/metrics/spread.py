"""Policy spread: mean pairwise total-variation distance between the
library's action distributions over sampled observations."""

from __future__ import annotations

import itertools

import numpy as np

from ..exceptions import ConfigurationError
from ..learners.dqn import epsilon_greedy_distribution  # noqa: F401 (re-export)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def policy_spread(
    library,
    observation_sample,
    action_count: int | None = None,
    exploration: float | None = None,
) -> float:
    """Mean TV distance over all unordered policy pairs and observations.

    Library entries may be PolicyRecords or bare learners; each learner
    exposes ``action_distribution(obs)`` (PPO: actor softmax; DQN: the
    epsilon-greedy distribution, optionally with an overridden exploration
    rate).
    """
    if len(library) < 2:
        raise ConfigurationError("policy spread needs at least two policies")
    if len(observation_sample) == 0:
        raise ConfigurationError("policy spread needs a non-empty observation sample")

    learners = [getattr(entry, "learner", entry) for entry in library]
    dists = np.array(
        [
            [_distribution(learner, obs, exploration) for obs in observation_sample]
            for learner in learners
        ]
    )
    total = 0.0
    pairs = 0
    for i, j in itertools.combinations(range(len(learners)), 2):
        total += 0.5 * np.abs(dists[i] - dists[j]).sum(axis=1).mean()
        pairs += 1
    return total / pairs


def _distribution(learner, obs, exploration):
    if exploration is None:
        return learner.action_distribution(obs)
    return learner.action_distribution(obs, exploration=exploration)
