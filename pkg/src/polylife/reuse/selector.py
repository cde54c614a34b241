"""Policy selection: epsilon-greedy on lifetime average reward, plus the
fixed balanced assignment used by the unadaptive conditions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigurationError
from .records import PolicyRecord


@dataclass
class SelectorConfig:
    mode: str = "adaptive"  # adaptive | unadaptive
    epsilon: float = 0.10
    assignment: dict[int, int] | None = None  # task_index -> policy_id

    def __post_init__(self):
        if self.mode not in ("adaptive", "unadaptive"):
            raise ConfigurationError(f"unknown selector mode {self.mode!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigurationError("selector epsilon must be in [0, 1]")
        if self.mode == "unadaptive" and self.assignment is None:
            raise ConfigurationError("unadaptive selection needs an assignment map")


def unadaptive_assignment(n_tau: int, n_pi: int, seed: int) -> dict[int, int]:
    """Shuffle the tasks and deal them round-robin; policy loads differ by
    at most one.  The one-to-one case maps every task to its own policy id."""
    if not 1 <= n_pi <= n_tau:
        raise ConfigurationError("need 1 <= n_pi <= n_tau")
    if n_pi == n_tau:
        return {task: task for task in range(n_tau)}
    rng = np.random.default_rng(seed)
    order = rng.permutation(n_tau)
    return {int(task): position % n_pi for position, task in enumerate(order)}


def select_policy(
    task_index: int,
    library: list[PolicyRecord],
    cfg: SelectorConfig,
    rng: np.random.Generator,
) -> int:
    """Pick the policy for the coming episode.

    Adaptive mode: with probability 1 - epsilon the policy with the highest
    lifetime average on this task (ties uniform); with probability epsilon a
    uniform-random policy.  Policies never tried on the task cannot be best,
    so they enter only through the epsilon branch; when no policy has been
    tried the choice is uniform.  Unadaptive mode follows the fixed map and
    consumes no randomness.
    """
    if not library:
        raise ConfigurationError("empty policy library")
    if cfg.mode == "unadaptive":
        return cfg.assignment[task_index]

    tried = [rec for rec in library if rec.tried(task_index)]
    if not tried:
        return library[int(rng.integers(len(library)))].policy_id
    if cfg.epsilon > 0.0 and rng.random() < cfg.epsilon:
        return library[int(rng.integers(len(library)))].policy_id
    averages = np.array([rec.lifetime_average(task_index) for rec in tried])
    best = np.flatnonzero(averages == averages.max())
    pick = best[0] if len(best) == 1 else best[int(rng.integers(len(best)))]
    return tried[int(pick)].policy_id
