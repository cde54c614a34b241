"""Partially observable grid-world family (single object of interest).

Topologies are ASCII maps shipped with the package (``#`` wall, ``.`` free,
``S`` agent start); coordinates are (x, y) with x increasing east and y
increasing south.  Episodes last exactly 1000 steps; there are no terminal
states, only the reset.  Observations are 11 values in {-1, +1}: walls in
N/E/S/W, object adjacency in N/E/S/W, and object within Manhattan distance
2/3/4.

Within a step the agent moves first, then the object; reward is granted when
both occupy the same cell after the moves.  A movement-1 object takes one
random step on steps where the post-increment counter is a multiple of 20.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from ..exceptions import ConfigurationError, UsageError
from .domains import TaskSpec

POCMAN_EPISODE_STEPS = 1000
POCMAN_ACTIONS = 5  # north, east, south, west, stay

# (dx, dy) per action; y grows to the south
DIRECTIONS = ((0, -1), (1, 0), (0, 1), (-1, 0))

AGENT_START = {"cheese": (1, 2), "sutton": (1, 3), "pocman": (4, 7)}
STATIC_OBJECT_SITES = {
    "cheese": ((3, 3), (5, 3)),
    "sutton": ((6, 1), (9, 1), (9, 6)),
    "pocman": ((1, 1), (1, 7), (7, 1), (7, 7)),
}
DYNAMIC_OBJECT_HOME = {"cheese": (3, 3), "sutton": (9, 1), "pocman": (4, 3)}


@dataclass(frozen=True)
class Maze:
    name: str
    walls: np.ndarray  # bool, indexed [y][x]
    start: tuple[int, int]

    @property
    def width(self) -> int:
        return self.walls.shape[1]

    @property
    def height(self) -> int:
        return self.walls.shape[0]

    def is_wall(self, x: int, y: int) -> bool:
        if 0 <= x < self.width and 0 <= y < self.height:
            return bool(self.walls[y, x])
        return True

    def free_cells(self) -> list[tuple[int, int]]:
        ys, xs = np.nonzero(~self.walls)
        return [(int(x), int(y)) for x, y in zip(xs, ys)]


def parse_maze(name: str, text: str) -> Maze:
    rows = [line for line in text.splitlines() if line]
    if not rows or len(set(map(len, rows))) != 1:
        raise ConfigurationError(f"maze {name!r} is empty or ragged")
    start = None
    walls = np.zeros((len(rows), len(rows[0])), dtype=bool)
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            if ch == "#":
                walls[y, x] = True
            elif ch == "S":
                start = (x, y)
            elif ch != ".":
                raise ConfigurationError(f"maze {name!r} has invalid character {ch!r}")
    if start is None:
        raise ConfigurationError(f"maze {name!r} has no start marker")
    maze = Maze(name, walls, start)
    _validate_coordinates(maze)
    return maze


def _validate_coordinates(maze: Maze) -> None:
    """The published start/object coordinates must be free cells of the map."""
    if maze.name not in AGENT_START:
        return
    if maze.start != AGENT_START[maze.name]:
        raise ConfigurationError(
            f"maze {maze.name!r} start {maze.start} does not match the expected "
            f"{AGENT_START[maze.name]}"
        )
    for site in STATIC_OBJECT_SITES[maze.name] + (DYNAMIC_OBJECT_HOME[maze.name],):
        if maze.is_wall(*site):
            raise ConfigurationError(f"maze {maze.name!r}: coordinate {site} is a wall")


@lru_cache(maxsize=None)
def load_maze(topology: str) -> Maze:
    path = resources.files("polylife.envs").joinpath(f"mazes/{topology}.txt")
    return parse_maze(topology, path.read_text(encoding="utf-8"))


@dataclass
class PocmanState:
    agent: tuple[int, int]
    obj: tuple[int, int]
    steps: int = 0
    termination: str | None = None


def pocman_reset(task: TaskSpec, rng: np.random.Generator) -> PocmanState:
    """Agent at the topology start; static objects at a random published site,
    dynamic objects at their home position."""
    maze = load_maze(task.topology)
    if task.movement == 0:
        sites = STATIC_OBJECT_SITES[task.topology]
        obj = sites[int(rng.integers(len(sites)))]
    else:
        obj = DYNAMIC_OBJECT_HOME[task.topology]
    return PocmanState(agent=maze.start, obj=obj)


def manhattan(a: tuple[int, int], b: tuple[int, int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def pocman_observe(task: TaskSpec, state: PocmanState) -> np.ndarray:
    maze = load_maze(task.topology)
    ax, ay = state.agent
    obs = np.full(11, -1.0)
    for i, (dx, dy) in enumerate(DIRECTIONS):
        if maze.is_wall(ax + dx, ay + dy):
            obs[i] = 1.0
        if state.obj == (ax + dx, ay + dy):
            obs[4 + i] = 1.0
    dist = manhattan(state.agent, state.obj)
    for i, reach in enumerate((2, 3, 4)):
        if dist <= reach:
            obs[8 + i] = 1.0
    return obs


def _attempt(maze: Maze, cell: tuple[int, int], direction: tuple[int, int]):
    nxt = (cell[0] + direction[0], cell[1] + direction[1])
    return cell if maze.is_wall(*nxt) else nxt


def _legal_moves(maze: Maze, cell: tuple[int, int]) -> list[tuple[int, int]]:
    out = []
    for dx, dy in DIRECTIONS:
        nxt = (cell[0] + dx, cell[1] + dy)
        if not maze.is_wall(*nxt):
            out.append(nxt)
    return out


def _random_direction_step(maze, cell, rng):
    direction = DIRECTIONS[int(rng.integers(4))]
    return _attempt(maze, cell, direction)


def _move_object(task, maze, obj, agent, steps, rng):
    if task.movement == 0:
        return obj
    if task.movement == 1:
        if steps % 20 == 0:
            return _random_direction_step(maze, obj, rng)
        return obj

    # movement == 2: reactive every step
    legal = _legal_moves(maze, obj)
    dist = manhattan(obj, agent)
    if task.reward > 0:  # defensive: move away 50%, else stand still
        if rng.random() < 0.5:
            away = [c for c in legal if manhattan(c, agent) > dist]
            if away:
                return away[int(rng.integers(len(away)))]
        return obj
    # aggressive: move towards 50%, else random action
    if rng.random() < 0.5:
        towards = [c for c in legal if manhattan(c, agent) < dist]
        if towards:
            return towards[int(rng.integers(len(towards)))]
        if legal:
            return legal[int(rng.integers(len(legal)))]
        return obj
    return _random_direction_step(maze, obj, rng)


def pocman_step(task: TaskSpec, state: PocmanState, action: int, rng: np.random.Generator):
    """Advance one step; returns (state', observation, reward, terminal)."""
    if state.termination is not None:
        raise UsageError("cannot step a finished pocman episode")
    if not 0 <= action < POCMAN_ACTIONS:
        raise ConfigurationError(f"action must be in [0, {POCMAN_ACTIONS}), got {action}")

    maze = load_maze(task.topology)
    agent = state.agent if action == 4 else _attempt(maze, state.agent, DIRECTIONS[action])
    steps = state.steps + 1
    obj = _move_object(task, maze, state.obj, agent, steps, rng)

    reward = task.reward if agent == obj else 0.0
    new = PocmanState(agent=agent, obj=obj, steps=steps)
    if steps >= POCMAN_EPISODE_STEPS:
        new.termination = "time-limit"
    return new, pocman_observe(task, new), reward, new.termination is not None
