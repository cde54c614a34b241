"""Lifetime policy reuse: fixed library, adaptive selection, control loop."""

from .engine import ReuseConfig, derive_rngs, run_episode, run_lifetime, run_single
from .records import EpisodeRecord, PolicyRecord, RunLog, TaskStats, record_outcome
from .selector import SelectorConfig, select_policy, unadaptive_assignment

__all__ = [
    "EpisodeRecord",
    "PolicyRecord",
    "ReuseConfig",
    "RunLog",
    "SelectorConfig",
    "TaskStats",
    "derive_rngs",
    "record_outcome",
    "run_episode",
    "run_lifetime",
    "run_single",
    "select_policy",
    "unadaptive_assignment",
]
