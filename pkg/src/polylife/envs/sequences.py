"""Task-sequence construction with the shifted-copy design.

The zeroth sequence draws a uniform random task per block; sequence n takes
task (i + n) mod n_tau wherever the zeroth has task i.  A vertical slice
across the n_tau sequences therefore contains every task exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigurationError


@dataclass(frozen=True)
class TaskSequence:
    sequence_id: int
    seed: int
    blocks: tuple[tuple[int, int], ...]  # (task_index, block_length)

    @property
    def task_indices(self) -> tuple[int, ...]:
        return tuple(task for task, _ in self.blocks)


def make_task_sequences(
    n_tau: int,
    n_sequences: int,
    n_blocks: int,
    seed: int,
    block_length: int = 1,
) -> list[TaskSequence]:
    """Build n_sequences shifted sequences of n_blocks blocks each.

    block_length is carried verbatim on every block; its unit (steps or
    episodes) is decided by the experiment configuration.
    """
    if not 1 <= n_sequences <= n_tau:
        raise ConfigurationError("need 1 <= n_sequences <= n_tau")
    if n_blocks < 1 or block_length < 1:
        raise ConfigurationError("n_blocks and block_length must be positive")
    rng = np.random.default_rng(seed)
    base = rng.integers(0, n_tau, size=n_blocks)
    sequences = []
    for n in range(n_sequences):
        blocks = tuple((int((i + n) % n_tau), block_length) for i in base)
        sequences.append(TaskSequence(sequence_id=n, seed=seed, blocks=blocks))
    return sequences
