"""Task descriptions and the domain builders."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..exceptions import ConfigurationError

CARTPOLE_GRIDS = {
    27: {
        "cart_mass": (0.5, 1.0, 2.0),
        "pole_mass": (0.05, 0.1, 0.2),
        "pole_length": (0.5, 1.0, 2.0),
    },
    125: {
        "cart_mass": (0.5, 0.75, 1.0, 1.5, 2.0),
        "pole_mass": (0.05, 0.075, 0.1, 0.15, 0.2),
        "pole_length": (0.5, 0.75, 1.0, 1.5, 2.0),
    },
}

POCMAN_REWARDS = (-1.0, 1.0)
POCMAN_MOVEMENTS = (0, 1, 2)  # static / random-every-20 / reactive
POCMAN_TOPOLOGIES = ("cheese", "sutton", "pocman")


@dataclass(frozen=True)
class TaskSpec:
    """One MDP/POMDP instance.

    Cartpole tasks carry (cart_mass, pole_mass, pole_length); POcman tasks
    carry (reward, movement, topology).  task_index is the task's rank within
    its domain.
    """

    domain: str  # cartpole | pocman
    task_index: int
    cart_mass: float | None = None
    pole_mass: float | None = None
    pole_length: float | None = None
    reward: float | None = None
    movement: int | None = None
    topology: str | None = None

    def __post_init__(self):
        if self.domain == "cartpole":
            if None in (self.cart_mass, self.pole_mass, self.pole_length):
                raise ConfigurationError("cartpole task missing physics parameters")
        elif self.domain == "pocman":
            if self.reward not in POCMAN_REWARDS:
                raise ConfigurationError(f"pocman reward must be -1 or +1, got {self.reward}")
            if self.movement not in POCMAN_MOVEMENTS:
                raise ConfigurationError(f"pocman movement must be 0, 1 or 2, got {self.movement}")
            if self.topology not in POCMAN_TOPOLOGIES:
                raise ConfigurationError(f"unknown topology {self.topology!r}")
        else:
            raise ConfigurationError(f"unknown domain {self.domain!r}")


def make_cartpole_domain(grid_size: int) -> list[TaskSpec]:
    """Full Cartesian product of the cartpole parameter grids (27 or 125 tasks),
    ordered lexicographically by (cart_mass, pole_mass, pole_length)."""
    if grid_size not in CARTPOLE_GRIDS:
        raise ConfigurationError(f"unsupported cartpole grid size {grid_size}")
    grid = CARTPOLE_GRIDS[grid_size]
    tasks = []
    for idx, (mc, mp, lp) in enumerate(
        itertools.product(grid["cart_mass"], grid["pole_mass"], grid["pole_length"])
    ):
        tasks.append(
            TaskSpec("cartpole", idx, cart_mass=mc, pole_mass=mp, pole_length=lp)
        )
    return tasks


def make_pocman_domain() -> list[TaskSpec]:
    """The 18 POcman tasks: (reward, movement, topology) product."""
    tasks = []
    for idx, (rw, mv, topo) in enumerate(
        itertools.product(POCMAN_REWARDS, POCMAN_MOVEMENTS, POCMAN_TOPOLOGIES)
    ):
        tasks.append(TaskSpec("pocman", idx, reward=rw, movement=mv, topology=topo))
    return tasks


def default_cartpole_task() -> TaskSpec:
    """The conventional cartpole: 1 kg cart, 0.1 kg pole, 1 m pole."""
    return TaskSpec("cartpole", 0, cart_mass=1.0, pole_mass=0.1, pole_length=1.0)


def domain_by_name(name: str) -> list[TaskSpec]:
    if name == "cartpole27":
        return make_cartpole_domain(27)
    if name == "cartpole125":
        return make_cartpole_domain(125)
    if name == "pocman18":
        return make_pocman_domain()
    raise ConfigurationError(f"unknown domain {name!r}")
