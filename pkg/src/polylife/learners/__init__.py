"""Base-learners and replay machinery."""

from .base import LEARNER_KINDS, UniformRandomLearner, burn_in, make_learner
from .dqn import DqnConfig, DqnLearner
from .ppo import PpoConfig, PpoLearner, gae_advantages, ppo_head_gradient
from .replay import (
    REPLAY_POLICIES,
    FifoBuffer,
    ReservoirBuffer,
    ReservoirFifoBuffer,
    TaskMatchingBuffer,
    Transition,
    buffer_insert,
    make_replay_buffer,
)

__all__ = [
    "LEARNER_KINDS",
    "REPLAY_POLICIES",
    "DqnConfig",
    "DqnLearner",
    "FifoBuffer",
    "PpoConfig",
    "PpoLearner",
    "ReservoirBuffer",
    "ReservoirFifoBuffer",
    "TaskMatchingBuffer",
    "Transition",
    "UniformRandomLearner",
    "buffer_insert",
    "burn_in",
    "gae_advantages",
    "make_learner",
    "make_replay_buffer",
    "ppo_head_gradient",
]
