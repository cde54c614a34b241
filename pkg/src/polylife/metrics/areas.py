"""Block areas and the forgetting/transfer ratios.

A block's area is the sum of per-episode returns over the block.  Both
ratios are normalised by the area a uniform-random policy achieves on the
task, making them comparable across base-learners:

    forgetting = (delta - delta_one_to_one) / area_uniform_random
    transfer   = (area_first_block - one_to_one_area) / area_uniform_random

where delta compares consecutive presentations of the same task within one
sequence.  Negative forgetting signals catastrophic forgetting; negative
transfer signals interference from prior tasks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import AnalysisError, UsageError
from ..reuse.records import RunLog

FORGETTING_BINS = ((0, 0), (1, 9), (10, 19), (20, 29), (30, None))


@dataclass(frozen=True)
class BlockArea:
    sequence_id: int
    task_index: int
    block_index: int
    area: float
    episodes: int


def block_areas(log: RunLog) -> list[BlockArea]:
    """Aggregate a run log into per-block areas, in block order."""
    buckets: dict[int, list] = {}
    tasks: dict[int, int] = {}
    for row in log.rows:
        buckets.setdefault(row.block_idx, []).append(row.episode_return)
        tasks.setdefault(row.block_idx, row.task_idx)
    return [
        BlockArea(log.sequence_id, tasks[b], b, float(np.sum(vals)), len(vals))
        for b, vals in sorted(buckets.items())
    ]


def forgetting_ratio(
    current: BlockArea,
    previous_same_task: BlockArea,
    one_to_one_delta: float,
    uniform_random_area: float,
) -> float:
    if uniform_random_area <= 0:
        raise AnalysisError("uniform-random area must be positive")
    if current.task_index != previous_same_task.task_index:
        raise UsageError("forgetting ratio compares presentations of one task")
    if current.block_index <= previous_same_task.block_index:
        raise UsageError("current block must follow the previous presentation")
    delta = current.area - previous_same_task.area
    return (delta - one_to_one_delta) / uniform_random_area


def transfer_ratio(
    first_block: BlockArea,
    one_to_one_first_block_area: float,
    uniform_random_area: float,
    presentation_index: int = 0,
) -> float:
    if uniform_random_area <= 0:
        raise AnalysisError("uniform-random area must be positive")
    if presentation_index != 0:
        raise UsageError("transfer ratio applies to a task's first presentation only")
    return (first_block.area - one_to_one_first_block_area) / uniform_random_area


def uniform_random_areas(logs: list[RunLog]) -> dict[int, float]:
    """Per-task baseline area from a dedicated uniform-random-policy run
    (mean over that task's blocks)."""
    sums: dict[int, list[float]] = {}
    for log in logs:
        for area in block_areas(log):
            sums.setdefault(area.task_index, []).append(area.area)
    return {task: float(np.mean(vals)) for task, vals in sums.items()}


def _presentations(areas: list[BlockArea]) -> dict[int, list[BlockArea]]:
    per_task: dict[int, list[BlockArea]] = {}
    for a in areas:
        per_task.setdefault(a.task_index, []).append(a)
    return per_task


def _check_paired(cond: list[BlockArea], ref: list[BlockArea], seq_id: int) -> None:
    if len(cond) != len(ref) or any(
        c.block_index != r.block_index or c.task_index != r.task_index
        for c, r in zip(cond, ref)
    ):
        raise AnalysisError(
            f"sequence {seq_id}: one-to-one run does not share the block layout"
        )


def paired_forgetting_rows(
    cond_log: RunLog, one_to_one_log: RunLog, uniform_areas: dict[int, float]
) -> list[dict]:
    """One row per same-task block transition: the forgetting ratio plus the
    number of interfering blocks in between."""
    cond = block_areas(cond_log)
    ref = block_areas(one_to_one_log)
    _check_paired(cond, ref, cond_log.sequence_id)
    ref_by_block = {a.block_index: a for a in ref}
    rows = []
    for task, presentations in _presentations(cond).items():
        for before, after in zip(presentations, presentations[1:]):
            ref_delta = (
                ref_by_block[after.block_index].area
                - ref_by_block[before.block_index].area
            )
            rows.append(
                {
                    "seq_id": cond_log.sequence_id,
                    "task_idx": task,
                    "block_before": before.block_index,
                    "block_after": after.block_index,
                    "interfering": after.block_index - before.block_index - 1,
                    "ratio": forgetting_ratio(after, before, ref_delta, uniform_areas[task]),
                }
            )
    return rows


def paired_transfer_rows(
    cond_log: RunLog, one_to_one_log: RunLog, uniform_areas: dict[int, float]
) -> list[dict]:
    """One row per task: the transfer ratio at its first presentation."""
    cond = block_areas(cond_log)
    ref = block_areas(one_to_one_log)
    _check_paired(cond, ref, cond_log.sequence_id)
    ref_by_block = {a.block_index: a for a in ref}
    rows = []
    for task, presentations in _presentations(cond).items():
        first = presentations[0]
        rows.append(
            {
                "seq_id": cond_log.sequence_id,
                "task_idx": task,
                "block_idx": first.block_index,
                "prior_blocks": first.block_index,
                "ratio": transfer_ratio(
                    first, ref_by_block[first.block_index].area, uniform_areas[task]
                ),
            }
        )
    return rows


def bin_label(lo: int, hi: int | None) -> str:
    if hi is None:
        return f">={lo}"
    if lo == hi:
        return str(lo)
    return f"{lo}-{hi}"


def binned_forgetting(rows: list[dict]) -> list[dict]:
    """Aggregate transition rows into the interfering-block bins
    {0, 1-9, 10-19, 20-29, >=30}."""
    out = []
    for lo, hi in FORGETTING_BINS:
        vals = [
            r["ratio"]
            for r in rows
            if r["interfering"] >= lo and (hi is None or r["interfering"] <= hi)
        ]
        if vals:
            arr = np.asarray(vals)
            stderr = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
            out.append(
                {
                    "bin": bin_label(lo, hi),
                    "mean": float(arr.mean()),
                    "stderr": stderr,
                    "n": len(arr),
                }
            )
        else:
            out.append({"bin": bin_label(lo, hi), "mean": float("nan"), "stderr": 0.0, "n": 0})
    return out
