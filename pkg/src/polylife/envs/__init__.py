"""Task families and sequence construction.

Cartpole: a fully observable MDP family parametrised by cart mass, pole mass
and pole length.  POcman: a partially observable grid-world family
parametrised by reward sign, object movement, and maze topology.
"""

from .cartpole import (
    CARTPOLE_MAX_STEPS,
    cartpole_observe,
    cartpole_reset,
    cartpole_step,
)
from .domains import TaskSpec, domain_by_name, make_cartpole_domain, make_pocman_domain
from .env_api import make_env
from .pocman import (
    POCMAN_ACTIONS,
    POCMAN_EPISODE_STEPS,
    Maze,
    load_maze,
    pocman_observe,
    pocman_reset,
    pocman_step,
)
from .rollout import RolloutStats, random_policy_rollout
from .sequences import TaskSequence, make_task_sequences

__all__ = [
    "CARTPOLE_MAX_STEPS",
    "POCMAN_ACTIONS",
    "POCMAN_EPISODE_STEPS",
    "Maze",
    "RolloutStats",
    "TaskSequence",
    "TaskSpec",
    "cartpole_observe",
    "cartpole_reset",
    "cartpole_step",
    "domain_by_name",
    "load_maze",
    "make_cartpole_domain",
    "make_env",
    "make_pocman_domain",
    "make_task_sequences",
    "pocman_observe",
    "pocman_reset",
    "pocman_step",
    "random_policy_rollout",
]
