"""Experience containers: FIFO ring, reservoir (global distribution
matching), reservoir-plus-FIFO hybrid, and per-task routing.

The reservoir draws a standard-normal key per insertion and keeps the
entries with the largest keys, which gives every lifetime experience the
same buffer-inclusion probability capacity/t.  The hybrid guarantees the
most recent tail of experiences is present and lets older ones compete in
the reservoir with the key drawn at their original insertion.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigurationError

REPLAY_POLICIES = ("fifo", "gdm-reservoir", "gdm-plus-fifo", "task-matching")


@dataclass(slots=True)
class Transition:
    obs: np.ndarray
    action: int
    reward: float
    next_obs: np.ndarray
    terminal: bool  # true terminal, not a step-limit cutoff
    task_index: int
    time: int
    episode_id: int = 0
    burn_in: bool = False


class FifoBuffer:
    """Ring buffer; oldest entries evicted first."""

    policy = "fifo"

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ConfigurationError("buffer capacity must be positive")
        self.capacity = capacity
        self._items: list[Transition] = []
        self._head = 0  # index of the oldest entry once the ring is full

    def __len__(self):
        return len(self._items)

    def insert(self, t: Transition, rng=None):
        if len(self._items) < self.capacity:
            self._items.append(t)
            return None
        evicted = self._items[self._head]
        self._items[self._head] = t
        self._head = (self._head + 1) % self.capacity
        return evicted

    def _logical(self, pos: int) -> Transition:
        return self._items[(self._head + pos) % len(self._items)]

    def contents(self) -> list[Transition]:
        return [self._logical(i) for i in range(len(self._items))]

    def sample(self, batch: int, rng: np.random.Generator) -> list[Transition]:
        idx = rng.integers(0, len(self._items), size=batch)
        return [self._items[i] for i in idx]

    def sample_traces(
        self, batch: int, length: int, rng: np.random.Generator
    ) -> list[list[Transition]]:
        """Overlapping windows with uniform start positions, cut at episode
        boundaries."""
        n = len(self._items)
        traces = []
        for start in rng.integers(0, n, size=batch):
            first = self._logical(int(start))
            trace = [first]
            for off in range(1, length):
                pos = int(start) + off
                if pos >= n:
                    break
                nxt = self._logical(pos)
                if nxt.episode_id != first.episode_id or nxt.time != trace[-1].time + 1:
                    break
                trace.append(nxt)
            traces.append(trace)
        return traces


class ReservoirBuffer:
    """Keeps the capacity entries with the largest normal keys."""

    policy = "gdm-reservoir"

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ConfigurationError("buffer capacity must be positive")
        self.capacity = capacity
        self._heap: list[tuple[float, int, Transition]] = []  # min-heap on key
        self._counter = 0

    def __len__(self):
        return len(self._heap)

    def insert(self, t: Transition, rng: np.random.Generator):
        key = float(rng.standard_normal())
        self.offer(key, t)

    def offer(self, key: float, t: Transition):
        self._counter += 1
        entry = (key, self._counter, t)
        if len(self._heap) < self.capacity:
            heapq.heappush(self._heap, entry)
        elif key > self._heap[0][0]:
            heapq.heapreplace(self._heap, entry)

    def contents(self) -> list[Transition]:
        return [t for _, _, t in self._heap]

    def sample(self, batch: int, rng: np.random.Generator) -> list[Transition]:
        idx = rng.integers(0, len(self._heap), size=batch)
        return [self._heap[i][2] for i in idx]


class ReservoirFifoBuffer:
    """Reservoir head plus a small FIFO tail (10% of capacity) holding the
    most recent experiences."""

    policy = "gdm-plus-fifo"

    def __init__(self, capacity: int, tail_fraction: float = 0.1):
        if capacity < 2:
            raise ConfigurationError("hybrid buffer needs capacity >= 2")
        tail_cap = max(1, int(round(capacity * tail_fraction)))
        self._tail_keys: list[tuple[float, Transition]] = []
        self._tail_cap = tail_cap
        self._head = ReservoirBuffer(capacity - tail_cap)
        self.capacity = capacity

    def __len__(self):
        return len(self._tail_keys) + len(self._head)

    def insert(self, t: Transition, rng: np.random.Generator):
        key = float(rng.standard_normal())
        self._tail_keys.append((key, t))
        if len(self._tail_keys) > self._tail_cap:
            old_key, old = self._tail_keys.pop(0)
            self._head.offer(old_key, old)

    def contents(self) -> list[Transition]:
        return [t for _, t in self._tail_keys] + self._head.contents()

    def sample(self, batch: int, rng: np.random.Generator) -> list[Transition]:
        pool = self.contents()
        idx = rng.integers(0, len(pool), size=batch)
        return [pool[i] for i in idx]


class TaskMatchingBuffer:
    """Routes experiences to per-task FIFO sub-buffers; replay draws only
    from the current task's sub-buffer."""

    policy = "task-matching"

    def __init__(self, capacity: int, n_tasks: int):
        if n_tasks < 1:
            raise ConfigurationError("task-matching buffer needs n_tasks >= 1")
        self.capacity = capacity
        self._per_task = max(1, capacity // n_tasks)
        self._buffers: dict[int, FifoBuffer] = {}

    def __len__(self):
        return sum(len(b) for b in self._buffers.values())

    def insert(self, t: Transition, rng=None):
        if t.task_index not in self._buffers:
            self._buffers[t.task_index] = FifoBuffer(self._per_task)
        self._buffers[t.task_index].insert(t)

    def contents(self) -> list[Transition]:
        out = []
        for task in sorted(self._buffers):
            out.extend(self._buffers[task].contents())
        return out

    def task_size(self, task_index: int) -> int:
        return len(self._buffers.get(task_index, ()))

    def sample(
        self, batch: int, rng: np.random.Generator, task_index: int | None = None
    ) -> list[Transition]:
        if task_index is None or task_index not in self._buffers:
            raise ConfigurationError("task-matching buffer requires a known task index")
        return self._buffers[task_index].sample(batch, rng)


def make_replay_buffer(policy: str, capacity: int, n_tasks: int = 1):
    if policy == "fifo":
        return FifoBuffer(capacity)
    if policy == "gdm-reservoir":
        return ReservoirBuffer(capacity)
    if policy == "gdm-plus-fifo":
        return ReservoirFifoBuffer(capacity)
    if policy == "task-matching":
        return TaskMatchingBuffer(capacity, n_tasks)
    raise ConfigurationError(f"unknown replay policy {policy!r}")


def buffer_insert(buffer, t: Transition, rng: np.random.Generator):
    """Insert honouring the buffer's retention policy; returns the buffer."""
    buffer.insert(t, rng)
    return buffer
