"""Memory-consumption model: fixed library versus dynamic policy generation.

The fixed baseline stores ceil(n_tau / C) policies for the whole lifetime.
The dynamic scheme opens a temporary policy the first time a task appears;
the temporary closes after accumulating T_c blocks of its task and is then
accepted into the permanent library with probability p or discarded (the
task thereafter maps to an existing policy and never reopens).  Task
arrivals are uniform-random per block.  Counts are taken at the end of each
block and averaged across runs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import ConfigurationError


@dataclass
class MemSimConfig:
    n_tau: int = 1000
    capacity: float = 5.0  # tasks one policy can serve (C)
    blocks_to_convergence: int = 4  # T_c
    acceptance_probability: float = 0.5
    n_blocks: int = 20_000
    runs: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.n_tau < 1 or self.capacity < 1 or self.blocks_to_convergence < 1:
            raise ConfigurationError("n_tau, capacity and T_c must be >= 1")
        if not 0.0 <= self.acceptance_probability <= 1.0:
            raise ConfigurationError("acceptance probability must be in [0, 1]")
        if self.n_blocks < 1 or self.runs < 1:
            raise ConfigurationError("n_blocks and runs must be positive")


@dataclass
class MemSimResult:
    config: MemSimConfig
    mean_library: np.ndarray  # per block
    mean_temporary: np.ndarray
    mean_total: np.ndarray
    baseline: int  # constant ceil(n_tau / C)

    def peak_mean_total(self) -> float:
        return float(self.mean_total.max())

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["block_idx", "mean_library", "mean_temporary", "mean_total", "baseline"]
            )
            for b in range(len(self.mean_total)):
                writer.writerow(
                    [b, repr(float(self.mean_library[b])),
                     repr(float(self.mean_temporary[b])),
                     repr(float(self.mean_total[b])), self.baseline]
                )


def _simulate_run(cfg: MemSimConfig, rng: np.random.Generator):
    library = np.zeros(cfg.n_blocks)
    temporary = np.zeros(cfg.n_blocks)
    open_blocks: dict[int, int] = {}  # task -> blocks its temporary accumulated
    closed: set[int] = set()
    n_library = 0
    arrivals = rng.integers(0, cfg.n_tau, size=cfg.n_blocks)
    accept = rng.random(size=cfg.n_blocks) < cfg.acceptance_probability
    for b in range(cfg.n_blocks):
        task = int(arrivals[b])
        if task not in closed:
            open_blocks[task] = open_blocks.get(task, 0) + 1
            if open_blocks[task] >= cfg.blocks_to_convergence:
                del open_blocks[task]
                closed.add(task)
                if accept[b]:
                    n_library += 1
        library[b] = n_library
        temporary[b] = len(open_blocks)
    return library, temporary


def simulate_memory(cfg: MemSimConfig) -> MemSimResult:
    """Average per-block policy counts over cfg.runs independent runs."""
    lib = np.zeros(cfg.n_blocks)
    tmp = np.zeros(cfg.n_blocks)
    root = np.random.SeedSequence(cfg.seed)
    for child in root.spawn(cfg.runs):
        one_lib, one_tmp = _simulate_run(cfg, np.random.default_rng(child))
        lib += one_lib
        tmp += one_tmp
    lib /= cfg.runs
    tmp /= cfg.runs
    return MemSimResult(
        config=cfg,
        mean_library=lib,
        mean_temporary=tmp,
        mean_total=lib + tmp,
        baseline=math.ceil(cfg.n_tau / cfg.capacity),
    )
