"""Shifted task-sequence construction."""

import numpy as np
import pytest

from polylife.envs import make_task_sequences
from polylife.exceptions import ConfigurationError


def test_shift_property():
    seqs = make_task_sequences(n_tau=18, n_sequences=18, n_blocks=40, seed=3)
    base = seqs[0].task_indices
    for n, seq in enumerate(seqs):
        assert seq.sequence_id == n
        for b, task in enumerate(seq.task_indices):
            assert task == (base[b] + n) % 18


@pytest.mark.parametrize("n_tau", [18, 27])
def test_vertical_slices_cover_all_tasks(n_tau):
    seqs = make_task_sequences(n_tau, n_tau, n_blocks=30, seed=5)
    for b in range(30):
        column = sorted(seq.task_indices[b] for seq in seqs)
        assert column == list(range(n_tau))


def test_same_seed_identical():
    a = make_task_sequences(27, 5, 20, seed=9, block_length=100)
    b = make_task_sequences(27, 5, 20, seed=9, block_length=100)
    assert a == b
    c = make_task_sequences(27, 5, 20, seed=10, block_length=100)
    assert a != c


def test_zeroth_sequence_tasks_in_range():
    seqs = make_task_sequences(27, 1, 500, seed=1)
    tasks = np.array(seqs[0].task_indices)
    assert tasks.min() >= 0 and tasks.max() < 27
    # uniform draw should touch most tasks over 500 blocks
    assert len(np.unique(tasks)) == 27


def test_block_lengths_constant():
    seqs = make_task_sequences(18, 3, 10, seed=2, block_length=60000)
    for seq in seqs:
        assert all(length == 60000 for _, length in seq.blocks)


def test_too_many_sequences_rejected():
    with pytest.raises(ConfigurationError):
        make_task_sequences(10, 11, 5, seed=0)
