"""Experiment orchestration.

Subcommands:
    run        execute a configured experiment (one worker per sequence)
    aggregate  fold per-episode CSVs into windowed learning curves
    metrics    forgetting/transfer ratios against one-to-one and random runs
    capacity   empirical and integrated task capacity from a results table
    memsim     memory-consumption model CSV
    cluster    pre-termination cluster analysis of a cartpole domain

The worker count is capped by the POLYLIFE_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .envs import domain_by_name, make_task_sequences, random_policy_rollout
from .exceptions import AnalysisError, ConfigurationError, PolylifeError
from .memsim import MemSimConfig, simulate_memory
from .metrics import (
    CapacityTable,
    binned_forgetting,
    block_areas,
    cluster_point_from_stats,
    cluster_tasks,
    empirical_task_capacity,
    integrated_task_capacity,
    paired_forgetting_rows,
    paired_transfer_rows,
    uniform_random_areas,
)
from .metrics.clusters import LINKAGE_THRESHOLD
from .reuse import ReuseConfig, RunLog, SelectorConfig, run_lifetime, unadaptive_assignment

DOMAINS = ("cartpole27", "cartpole125", "pocman18")
RECURRENT_LEARNERS = ("drqn", "ppo-lstm")
FEEDFORWARD_LEARNERS = ("dqn", "ppo")
ALL_LEARNERS = FEEDFORWARD_LEARNERS + RECURRENT_LEARNERS + ("uniform-random",)

CONFIG_KEYS = {
    "domain", "learner", "n_policies", "selector", "eps_select", "n_sequences",
    "block_length", "block_unit", "blocks_per_sequence", "learner_overrides",
    "replay_variant", "seed", "out_dir", "spread_every", "assignment_seed",
}


@dataclass
class ExperimentConfig:
    domain: str
    learner: str
    n_policies: int
    selector: str
    n_sequences: int
    block_length: int
    blocks_per_sequence: int
    seed: int
    eps_select: float = 0.10
    block_unit: str | None = None  # default chosen by domain
    learner_overrides: dict = field(default_factory=dict)
    replay_variant: str | None = None
    out_dir: str | None = None
    spread_every: int | None = None
    assignment_seed: int | None = None

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        unknown = set(raw) - CONFIG_KEYS
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        missing = {"domain", "learner", "n_policies", "selector", "n_sequences",
                   "block_length", "blocks_per_sequence", "seed"} - set(raw)
        if missing:
            raise ConfigurationError(f"missing config keys: {sorted(missing)}")
        return cls(**raw)

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ConfigurationError(f"unknown domain {self.domain!r}")
        if self.learner not in ALL_LEARNERS:
            raise ConfigurationError(f"unknown learner {self.learner!r}")
        pocman = self.domain == "pocman18"
        if pocman and self.learner in FEEDFORWARD_LEARNERS:
            raise ConfigurationError("pocman requires a recurrent learner")
        if not pocman and self.learner in RECURRENT_LEARNERS:
            raise ConfigurationError("cartpole uses the feedforward learners")
        n_tau = len(domain_by_name(self.domain))
        if not 1 <= self.n_policies <= n_tau:
            raise ConfigurationError("need 1 <= n_policies <= n_tau")
        if self.n_sequences < 1 or self.n_sequences > n_tau:
            raise ConfigurationError("need 1 <= n_sequences <= n_tau")
        if self.block_length < 1 or self.blocks_per_sequence < 1:
            raise ConfigurationError("block length and count must be positive")
        if self.selector not in ("adaptive", "unadaptive"):
            raise ConfigurationError(f"unknown selector {self.selector!r}")
        if self.replay_variant is not None and self.learner not in ("dqn", "drqn"):
            raise ConfigurationError("replay variants apply to value learners only")
        if self.block_unit is None:
            self.block_unit = "episodes" if pocman else "steps"
        if self.block_unit not in ("steps", "episodes"):
            raise ConfigurationError("block_unit must be steps or episodes")

    @property
    def n_tau(self) -> int:
        return len(domain_by_name(self.domain))

    @property
    def time_unit(self) -> str:
        return "episodes" if self.domain == "pocman18" else "steps"

    @property
    def score_mode(self) -> str:
        return "per_step_reward" if self.domain == "pocman18" else "block_mean_return"

    def condition_name(self) -> str:
        prefix = "Adaptive" if self.selector == "adaptive" else "Unadaptive"
        label = {"dqn": "DQN", "drqn": "DRQN", "ppo": "PPO",
                 "ppo-lstm": "PPO-LSTM", "uniform-random": "Random"}[self.learner]
        return f"{prefix}{label}{self.n_policies}P"

    def reuse_config(self) -> ReuseConfig:
        overrides = dict(self.learner_overrides)
        if self.replay_variant is not None:
            overrides["replay_policy"] = self.replay_variant
        if self.selector == "unadaptive":
            seed = self.seed if self.assignment_seed is None else self.assignment_seed
            selector = SelectorConfig(
                mode="unadaptive", epsilon=self.eps_select,
                assignment=unadaptive_assignment(self.n_tau, self.n_policies, seed),
            )
        else:
            selector = SelectorConfig(mode="adaptive", epsilon=self.eps_select)
        return ReuseConfig(
            n_policies=self.n_policies,
            learner=self.learner,
            selector=selector,
            learner_overrides=overrides,
            time_unit=self.time_unit,
            block_unit=self.block_unit,
            spread_every=self.spread_every,
        )


def block_scores(log: RunLog, score_mode: str) -> list[float]:
    """Per-block score: mean episode return, or reward per step for the
    non-episodic scoring convention."""
    scores = []
    for area in block_areas(log):
        if score_mode == "per_step_reward":
            steps = sum(r.steps for r in log.rows if r.block_idx == area.block_index)
            scores.append(area.area / steps)
        else:
            scores.append(area.area / area.episodes)
    return scores


def summarize_log(log: RunLog, score_mode: str, final_blocks: int = 10) -> dict:
    scores = block_scores(log, score_mode)
    return {
        "seq_id": log.sequence_id,
        "lifetime_average": float(np.mean(scores)),
        "final_average": float(np.mean(scores[-final_blocks:])),
        "episodes": len(log.rows),
        "steps": int(sum(r.steps for r in log.rows)),
    }


class _CsvRowSink:
    """Streams episode rows to disk so partial logs survive failures."""

    def __init__(self, path):
        from .reuse.records import CSV_COLUMNS

        self._fh = open(path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(CSV_COLUMNS)

    def __call__(self, row):
        self._writer.writerow(
            [row.seq_id, row.block_idx, row.episode_idx, row.task_idx,
             row.policy_id, repr(row.episode_return), row.steps]
        )
        self._fh.flush()

    def close(self):
        self._fh.close()


def _run_one_sequence(args):
    cfg_dict, sequence_id, out_dir = args
    cfg = ExperimentConfig(**cfg_dict)
    domain = domain_by_name(cfg.domain)
    sequences = make_task_sequences(
        cfg.n_tau, cfg.n_sequences, cfg.blocks_per_sequence, cfg.seed,
        block_length=cfg.block_length,
    )
    sequence = sequences[sequence_id]
    csv_path = Path(out_dir) / f"seq_{sequence_id:03d}.csv"
    sink = _CsvRowSink(csv_path)
    try:
        log, _, spread_rows = run_lifetime(
            domain, sequence, cfg.reuse_config(), cfg.seed, row_sink=sink
        )
    finally:
        sink.close()
    return summarize_log(log, cfg.score_mode), spread_rows


def max_workers(n_jobs: int) -> int:
    cap = os.environ.get("POLYLIFE_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_jobs, limit))


def cmd_run(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    out_dir = Path(args.out or cfg.out_dir or "runs/" + cfg.condition_name())
    out_dir.mkdir(parents=True, exist_ok=True)
    resolved = {**cfg.__dict__, "out_dir": str(out_dir)}
    (out_dir / "config.json").write_text(json.dumps(resolved, indent=2) + "\n")

    jobs = [(resolved, i, str(out_dir)) for i in range(cfg.n_sequences)]
    workers = max_workers(len(jobs))
    failures = 0
    summaries, spread_all = [], []
    if workers == 1:
        results = []
        for job in jobs:
            try:
                results.append(_run_one_sequence(job))
            except PolylifeError as exc:
                print(f"sequence {job[1]} failed: {exc}", file=sys.stderr)
                failures += 1
    else:
        results = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_one_sequence, job) for job in jobs]
            for i, fut in enumerate(futures):
                try:
                    results.append(fut.result())
                except PolylifeError as exc:
                    print(f"sequence {i} failed: {exc}", file=sys.stderr)
                    failures += 1
    for summary, spread_rows in results:
        summaries.append(summary)
        spread_all.extend(
            {"seq_id": summary["seq_id"], "block_idx": b, "spread": s}
            for b, s in spread_rows
        )

    if summaries:
        lifetimes = [s["lifetime_average"] for s in summaries]
        finals = [s["final_average"] for s in summaries]
        summary = {
            "condition": cfg.condition_name(),
            "domain": cfg.domain,
            "seed": cfg.seed,
            "n_sequences": len(summaries),
            "per_sequence": summaries,
            "lifetime_average_mean": float(np.mean(lifetimes)),
            "lifetime_average_stderr": _stderr(lifetimes),
            "final_average_mean": float(np.mean(finals)),
            "final_average_stderr": _stderr(finals),
        }
        (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if spread_all:
        with (out_dir / "spread.csv").open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["seq_id", "block_idx", "spread"])
            writer.writeheader()
            writer.writerows(spread_all)
    return 1 if failures else 0


def _stderr(values) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def _load_run_dir(path) -> list[RunLog]:
    files = sorted(Path(path).glob("seq_*.csv"))
    if not files:
        raise AnalysisError(f"no seq_*.csv files under {path}")
    return [RunLog.from_csv(f) for f in files]


def cmd_aggregate(args) -> int:
    logs = _load_run_dir(args.in_dir)
    score_mode = args.score_mode
    window = args.window
    per_seq = [block_scores(log, score_mode) for log in logs]
    n_blocks = min(len(s) for s in per_seq)
    out_path = Path(args.out or Path(args.in_dir) / "curve.csv")
    with out_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_idx", "block_start", "block_end", "mean", "stderr", "n"])
        for w, start in enumerate(range(0, n_blocks, window)):
            end = min(start + window, n_blocks)
            vals = [float(np.mean(s[start:end])) for s in per_seq]
            writer.writerow(
                [w, start, end - 1, repr(float(np.mean(vals))), repr(_stderr(vals)),
                 len(vals)]
            )
    print(out_path)
    return 0


def cmd_metrics(args) -> int:
    cond = _load_run_dir(args.in_dir)
    ref = _load_run_dir(args.one_to_one)
    base = _load_run_dir(args.baseline)
    uniform = uniform_random_areas(base)
    ref_by_seq = {log.sequence_id: log for log in ref}
    out_dir = Path(args.out or args.in_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    forgetting, transfer = [], []
    for log in cond:
        if log.sequence_id not in ref_by_seq:
            raise AnalysisError(f"sequence {log.sequence_id}: no paired one-to-one run")
        forgetting.extend(paired_forgetting_rows(log, ref_by_seq[log.sequence_id], uniform))
        transfer.extend(paired_transfer_rows(log, ref_by_seq[log.sequence_id], uniform))

    _write_dicts(out_dir / "forgetting.csv", forgetting,
                 ["seq_id", "task_idx", "block_before", "block_after", "interfering", "ratio"])
    _write_dicts(out_dir / "transfer.csv", transfer,
                 ["seq_id", "task_idx", "block_idx", "prior_blocks", "ratio"])
    _write_dicts(out_dir / "forgetting_bins.csv", binned_forgetting(forgetting),
                 ["bin", "mean", "stderr", "n"])
    print(out_dir / "forgetting_bins.csv")
    return 0


def _write_dicts(path, rows, fieldnames):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


def read_capacity_table(path, n_tau) -> CapacityTable:
    entries = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"n_policies", "lifetime_average"} <= set(
            reader.fieldnames
        ):
            raise AnalysisError("capacity table needs n_policies and lifetime_average columns")
        for row in reader:
            entries[int(row["n_policies"])] = float(row["lifetime_average"])
    if n_tau not in entries:
        raise AnalysisError(f"capacity table lacks the 1-to-1 row (n_policies = {n_tau})")
    return CapacityTable(entries=entries, one_to_one=n_tau)


def cmd_capacity(args) -> int:
    table = read_capacity_table(args.table, args.ntau)
    c_emp, n_star = empirical_task_capacity(table, args.ntau, eps_c=args.eps)
    itc = integrated_task_capacity(table, args.ntau)
    print(json.dumps({
        "eps_c": args.eps,
        "n_pi_star": n_star,
        "c_emp": round(c_emp, 6),
        "itc": round(itc, 6),
    }))
    return 0


def cmd_memsim(args) -> int:
    cfg = MemSimConfig(
        n_tau=args.ntau,
        capacity=args.capacity,
        blocks_to_convergence=args.tc,
        acceptance_probability=args.accept,
        n_blocks=args.blocks,
        runs=args.runs,
        seed=args.seed,
    )
    result = simulate_memory(cfg)
    out = Path(args.out or "memsim.csv")
    result.to_csv(out)
    print(json.dumps({
        "baseline": result.baseline,
        "peak_mean_total": round(result.peak_mean_total(), 3),
        "csv": str(out),
    }))
    return 0


def cmd_cluster(args) -> int:
    domain = domain_by_name(args.domain)
    if domain[0].domain != "cartpole":
        raise ConfigurationError("cluster analysis applies to cartpole domains")
    root = np.random.SeedSequence(args.seed)
    points = []
    stats_rows = []
    for task, child in zip(domain, root.spawn(len(domain))):
        stats = random_policy_rollout(task, args.steps, np.random.default_rng(child))
        points.append(cluster_point_from_stats(stats))
        stats_rows.append({
            "task_idx": task.task_index,
            "boundary_angular_speed": stats.boundary_angular_speed,
            "mean_episode_length": stats.mean_pretermination_length,
            "angle_events": stats.angle_count,
            "position_events": stats.position_count,
        })
    result = cluster_tasks(points, linkage_threshold=args.threshold)
    if args.out:
        _write_dicts(args.out, stats_rows,
                     ["task_idx", "boundary_angular_speed", "mean_episode_length",
                      "angle_events", "position_events"])
    print(json.dumps({
        "clusters": result.count,
        "capacity_estimate": round(result.capacity_estimate, 3),
        "steps_per_task": args.steps,
        "threshold": args.threshold,
    }))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polylife", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a configured experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("aggregate", help="windowed learning curve from run CSVs")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--window", type=int, default=25)
    p.add_argument("--out", default=None)
    p.add_argument("--score-mode", default="block_mean_return",
                   choices=["block_mean_return", "per_step_reward"])
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("metrics", help="forgetting and transfer ratios")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--baseline", required=True, help="uniform-random run directory")
    p.add_argument("--one-to-one", dest="one_to_one", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("capacity", help="task capacity from a results table")
    p.add_argument("--table", required=True)
    p.add_argument("--ntau", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.05)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("memsim", help="memory-consumption simulation")
    p.add_argument("--ntau", type=int, default=1000)
    p.add_argument("--capacity", type=float, required=True)
    p.add_argument("--tc", type=int, required=True)
    p.add_argument("--accept", type=float, required=True)
    p.add_argument("--blocks", type=int, default=20_000)
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_memsim)

    p = sub.add_parser("cluster", help="pre-termination task clustering")
    p.add_argument("--domain", default="cartpole27")
    p.add_argument("--steps", type=int, default=600_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold", type=float, default=LINKAGE_THRESHOLD)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_cluster)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, AnalysisError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PolylifeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
