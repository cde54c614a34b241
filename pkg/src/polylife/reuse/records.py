"""Policy library entries and the per-episode run log."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..exceptions import AnalysisError

CSV_COLUMNS = ("seq_id", "block_idx", "episode_idx", "task_idx", "policy_id",
               "return", "steps")


@dataclass
class TaskStats:
    cumulative_reward: float = 0.0
    time_used: int = 0  # t_ij; steps or episodes depending on the domain
    blocks_seen: int = 0
    last_block: int = -1

    @property
    def lifetime_average(self) -> float:
        """R_ij; defined only once the policy has spent time on the task."""
        if self.time_used <= 0:
            raise ZeroDivisionError("lifetime average undefined before first use")
        return self.cumulative_reward / self.time_used


class PolicyRecord:
    """One library entry: a learner plus its per-task lifetime statistics."""

    def __init__(self, policy_id: int, learner, rng: np.random.Generator):
        self.policy_id = policy_id
        self.learner = learner
        self.rng = rng
        self.stats: dict[int, TaskStats] = {}

    def stats_for(self, task_index: int) -> TaskStats:
        if task_index not in self.stats:
            self.stats[task_index] = TaskStats()
        return self.stats[task_index]

    def tried(self, task_index: int) -> bool:
        s = self.stats.get(task_index)
        return s is not None and s.time_used > 0

    def lifetime_average(self, task_index: int) -> float:
        return self.stats_for(task_index).lifetime_average


def record_outcome(record: PolicyRecord, task_index: int, episode_return: float,
                   steps: int, time_unit: str = "steps",
                   block_index: int | None = None) -> PolicyRecord:
    """Fold one episode into the policy's lifetime statistics for the task.

    time_unit selects what t_ij counts: environment steps (cartpole) or
    episodes (pocman).  The lifetime average is the running mean over all
    time units ever spent, never a window.
    """
    stats = record.stats_for(task_index)
    stats.cumulative_reward += float(episode_return)
    stats.time_used += int(steps) if time_unit == "steps" else 1
    if block_index is not None and block_index != stats.last_block:
        stats.blocks_seen += 1
        stats.last_block = block_index
    return record


@dataclass
class EpisodeRecord:
    seq_id: int
    block_idx: int
    episode_idx: int
    task_idx: int
    policy_id: int
    episode_return: float
    steps: int


@dataclass
class RunLog:
    """Append-only per-episode log of one lifetime."""

    sequence_id: int
    rows: list[EpisodeRecord] = field(default_factory=list)

    def append(self, row: EpisodeRecord) -> None:
        if self.rows and row.block_idx < self.rows[-1].block_idx:
            raise AnalysisError("block indices must be non-decreasing")
        self.rows.append(row)

    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for r in self.rows:
                writer.writerow(
                    [r.seq_id, r.block_idx, r.episode_idx, r.task_idx,
                     r.policy_id, repr(r.episode_return), r.steps]
                )

    @classmethod
    def from_csv(cls, path) -> "RunLog":
        path = Path(path)
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(header) != CSV_COLUMNS:
                raise AnalysisError(f"{path}: unexpected columns {header}")
            rows = [
                EpisodeRecord(int(a), int(b), int(c), int(d), int(e), float(f), int(g))
                for a, b, c, d, e, f, g in reader
            ]
        if not rows:
            return cls(sequence_id=-1, rows=[])
        log = cls(sequence_id=rows[0].seq_id)
        for r in rows:
            log.append(r)
        return log
