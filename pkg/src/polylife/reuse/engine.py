"""The lifetime control loop.

Per task-block, per episode: select a policy, let it act AND learn for the
whole episode, then feed the episode outcome back into its lifetime
statistics.  The library size is fixed for the whole lifetime.

Randomness discipline: the run seed and sequence id derive independent
streams for the environment, the selector, and each policy.  Unadaptive
selection consumes no randomness, so a 1-policy unadaptive lifetime is
bit-identical to running the bare base-learner on the same sequence.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..envs import make_env
from ..envs.sequences import TaskSequence
from ..exceptions import ConfigurationError
from ..learners import burn_in, make_learner
from .records import EpisodeRecord, PolicyRecord, RunLog, record_outcome
from .selector import SelectorConfig, select_policy


@dataclass
class ReuseConfig:
    n_policies: int
    learner: str
    selector: SelectorConfig
    learner_overrides: dict = field(default_factory=dict)
    time_unit: str = "steps"  # unit of t_ij: steps | episodes
    block_unit: str = "steps"  # unit of block lengths: steps | episodes
    spread_every: int | None = None  # blocks between policy-spread probes
    spread_sample: int = 1000
    spread_window: int = 100_000

    def __post_init__(self):
        if self.n_policies < 1:
            raise ConfigurationError("need at least one policy")
        if self.time_unit not in ("steps", "episodes"):
            raise ConfigurationError("time_unit must be steps or episodes")
        if self.block_unit not in ("steps", "episodes"):
            raise ConfigurationError("block_unit must be steps or episodes")


def derive_rngs(seed: int, sequence_id: int, n_policies: int):
    """Independent streams per run: environment, selector, one per policy,
    and a probe stream for spread sampling."""
    root = np.random.SeedSequence(entropy=seed, spawn_key=(sequence_id,))
    env_ss, sel_ss, pol_ss, probe_ss = root.spawn(4)
    policy_rngs = [np.random.default_rng(ss) for ss in pol_ss.spawn(n_policies)]
    return (
        np.random.default_rng(env_ss),
        np.random.default_rng(sel_ss),
        policy_rngs,
        np.random.default_rng(probe_ss),
    )


def build_learner(kind, obs_dim, action_count, n_tasks, overrides, rng):
    overrides = dict(overrides or {})
    if kind in ("dqn", "drqn"):
        overrides.setdefault("n_tasks", n_tasks)
    return make_learner(kind, obs_dim, action_count, rng, overrides)


def run_episode(env, learner, task_index, policy_rng, env_rng, obs_sink=None):
    """One full episode: reset, optional recurrent burn-in, act/learn loop.
    Returns (episode_return, steps)."""
    obs = env.reset(env_rng)
    learner.start_episode()
    if obs_sink is not None:
        obs_sink(np.asarray(obs))
    obs, total, steps, terminal, truncated = burn_in(
        learner, env, task_index, obs, policy_rng, env_rng
    )
    while not terminal:
        action = learner.act(obs, policy_rng)
        next_obs, reward, terminal, truncated = env.step(action, env_rng)
        learner.observe(
            obs, action, reward, next_obs, terminal, truncated, task_index, policy_rng
        )
        total += reward
        steps += 1
        obs = next_obs
        if obs_sink is not None:
            obs_sink(np.asarray(obs))
    learner.end_episode(policy_rng)
    return total, steps


def run_lifetime(domain, sequence: TaskSequence, cfg: ReuseConfig, seed: int,
                 row_sink=None):
    """Run one lifetime over one task sequence.

    Returns (RunLog, library, spread_rows); spread_rows is a list of
    (block_idx, mean pairwise total-variation distance), empty unless
    spread probing was configured.  row_sink, when given, receives every
    EpisodeRecord as it is produced (incremental persistence).
    """
    if cfg.selector.mode == "unadaptive" and cfg.selector.assignment is not None:
        if max(cfg.selector.assignment.values()) >= cfg.n_policies:
            raise ConfigurationError("assignment references a missing policy")

    probe_env = make_env(domain[0])
    obs_dim, action_count = probe_env.obs_dim, probe_env.action_count
    env_rng, selector_rng, policy_rngs, probe_rng = derive_rngs(
        seed, sequence.sequence_id, cfg.n_policies
    )
    library = [
        PolicyRecord(i, build_learner(cfg.learner, obs_dim, action_count,
                                      len(domain), cfg.learner_overrides,
                                      policy_rngs[i]), policy_rngs[i])
        for i in range(cfg.n_policies)
    ]

    log = RunLog(sequence_id=sequence.sequence_id)
    spread_rows = []
    recent_obs = deque(maxlen=cfg.spread_window) if cfg.spread_every else None
    sink = recent_obs.append if recent_obs is not None else None

    for block_idx, (task_idx, block_length) in enumerate(sequence.blocks):
        env = make_env(domain[task_idx])
        consumed = 0
        episode_idx = 0
        while consumed < block_length:
            policy_id = select_policy(task_idx, library, cfg.selector, selector_rng)
            record = library[policy_id]
            episode_return, steps = run_episode(
                env, record.learner, task_idx, record.rng, env_rng, obs_sink=sink
            )
            record_outcome(record, task_idx, episode_return, steps,
                           time_unit=cfg.time_unit, block_index=block_idx)
            row = EpisodeRecord(sequence.sequence_id, block_idx, episode_idx,
                                task_idx, policy_id, episode_return, steps)
            log.append(row)
            if row_sink is not None:
                row_sink(row)
            consumed += steps if cfg.block_unit == "steps" else 1
            episode_idx += 1

        if cfg.spread_every and (block_idx + 1) % cfg.spread_every == 0 and recent_obs:
            from ..metrics.spread import policy_spread

            pool = list(recent_obs)
            idx = probe_rng.integers(0, len(pool), size=min(cfg.spread_sample, len(pool)))
            sample = [pool[i] for i in idx]
            spread_rows.append(
                (block_idx, policy_spread(library, sample, action_count=action_count))
            )

    return log, library, spread_rows


def run_single(domain, sequence: TaskSequence, learner_kind: str, overrides,
               seed: int, block_unit: str = "steps"):
    """Plain single-policy baseline: the base-learner runs the sequence with
    no library or selector; the reference for the degenerate-reduction check."""
    probe_env = make_env(domain[0])
    env_rng, _, policy_rngs, _ = derive_rngs(seed, sequence.sequence_id, 1)
    learner = build_learner(learner_kind, probe_env.obs_dim, probe_env.action_count,
                            len(domain), overrides, policy_rngs[0])
    log = RunLog(sequence_id=sequence.sequence_id)
    for block_idx, (task_idx, block_length) in enumerate(sequence.blocks):
        env = make_env(domain[task_idx])
        consumed = 0
        episode_idx = 0
        while consumed < block_length:
            episode_return, steps = run_episode(
                env, learner, task_idx, policy_rngs[0], env_rng
            )
            log.append(
                EpisodeRecord(sequence.sequence_id, block_idx, episode_idx,
                              task_idx, 0, episode_return, steps)
            )
            consumed += steps if block_unit == "steps" else 1
            episode_idx += 1
    return log
