"""Deep (Recurrent) Q-Network: epsilon-greedy value learner with private
replay, a slowly synchronised target network, and AdaDelta updates.

Defaults follow the published parameter tables: batch 10, update every 4
steps, 400k replay capacity, learning starts after 50k experiences, target
sync every 10k steps, exploration 0.2 with no annealing, element-wise
gradient clipping at 10.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigurationError
from ..nncore import (
    OptimizerState,
    RecurrentState,
    backward,
    clip_gradients,
    forward,
    forward_sequence,
    glorot_init,
    optimizer_step,
)
from ..nncore.network import spec_mlp, spec_recurrent
from .replay import Transition, make_replay_buffer


def q_targets(rewards, terminals, max_next_q, gamma):
    """Regression targets r + gamma * max_a' Q(s', a'); r alone for terminals."""
    return np.asarray(rewards) + gamma * np.where(
        np.asarray(terminals, dtype=bool), 0.0, np.asarray(max_next_q)
    )


def epsilon_greedy_distribution(q: np.ndarray, exploration: float) -> np.ndarray:
    """Action distribution of an epsilon-greedy value policy: the argmax
    action gets 1 - eps + eps/|A|, every other action eps/|A|."""
    probs = np.full(len(q), exploration / len(q))
    probs[int(np.argmax(q))] += 1.0 - exploration
    return probs


@dataclass
class DqnConfig:
    hidden: int = 80
    recurrent: bool = False
    gamma: float = 0.99
    batch_size: int = 10
    update_every: int = 4
    buffer_capacity: int = 400_000
    replay_start: int = 50_000
    target_sync_every: int = 10_000
    optimizer: str = "adadelta"
    learning_rate: float = 0.1
    momentum: float = 0.95
    exploration: float = 0.2
    grad_clip_abs: float = 10.0
    trace_length: int = 15
    replay_policy: str = "fifo"
    n_tasks: int = 1  # sub-buffer count for task-matching replay
    updates_per_cycle: int = 1  # gradient updates at each update event

    def __post_init__(self):
        if not 0.0 <= self.exploration <= 1.0:
            raise ConfigurationError("exploration rate must be in [0, 1]")
        if min(self.batch_size, self.update_every, self.target_sync_every) < 1:
            raise ConfigurationError("periods must be positive")
        if self.recurrent and self.replay_policy != "fifo":
            raise ConfigurationError("trace replay requires the fifo buffer")

    @classmethod
    def for_domain(cls, domain: str, **overrides) -> "DqnConfig":
        if domain == "pocman":
            overrides.setdefault("recurrent", True)
        return cls(**overrides)


class DqnLearner:
    is_recurrent: bool

    def __init__(self, obs_dim: int, action_count: int, cfg: DqnConfig,
                 rng: np.random.Generator):
        self.cfg = cfg
        self.obs_dim = obs_dim
        self.action_count = action_count
        self.is_recurrent = cfg.recurrent
        if cfg.recurrent:
            self.spec = spec_recurrent(obs_dim, cfg.hidden, action_count)
        else:
            self.spec = spec_mlp(obs_dim, cfg.hidden, action_count)
        self.params = glorot_init(self.spec, rng)
        self.target_params = self.params.copy()
        if cfg.optimizer == "adadelta":
            self.opt = OptimizerState.adadelta(
                self.params, learning_rate=cfg.learning_rate, rho=cfg.momentum
            )
        elif cfg.optimizer == "adam":
            self.opt = OptimizerState.adam(self.params, learning_rate=cfg.learning_rate)
        else:
            raise ConfigurationError(f"unknown optimizer {cfg.optimizer!r}")
        self.buffer = make_replay_buffer(cfg.replay_policy, cfg.buffer_capacity, cfg.n_tasks)
        self.rstate = None
        self.steps_seen = 0
        self.updates_done = 0
        self.episode_id = -1
        self.current_task = 0

    def start_episode(self):
        self.episode_id += 1
        if self.is_recurrent:
            self.rstate = RecurrentState.zeros(self.cfg.hidden)

    def q_values(self, obs: np.ndarray, advance: bool = True) -> np.ndarray:
        """Network output for one observation; advances the recurrent state."""
        if self.is_recurrent:
            q, state, _ = forward(self.spec, self.params, obs, self.rstate, want_tape=False)
            if advance:
                self.rstate = state
            return q
        q, _, _ = forward(self.spec, self.params, obs, want_tape=False)
        return q

    def advance_state(self, obs: np.ndarray) -> None:
        if self.is_recurrent:
            self.q_values(obs)

    def action_distribution(self, obs, exploration: float | None = None) -> np.ndarray:
        """Probe distribution for the spread metric, from a fresh state."""
        if self.is_recurrent:
            q, _, _ = forward(self.spec, self.params, obs,
                              RecurrentState.zeros(self.cfg.hidden), want_tape=False)
        else:
            q, _, _ = forward(self.spec, self.params, obs, want_tape=False)
        eps = self.cfg.exploration if exploration is None else exploration
        return epsilon_greedy_distribution(q, eps)

    def act(self, obs: np.ndarray, rng: np.random.Generator) -> int:
        """Epsilon-greedy on the Q-values; argmax ties broken uniformly."""
        q = self.q_values(obs)
        eps = self.cfg.exploration
        if eps > 0.0 and rng.random() < eps:
            return int(rng.integers(self.action_count))
        best = np.flatnonzero(q == q.max())
        if len(best) == 1:
            return int(best[0])
        return int(best[rng.integers(len(best))])

    def observe(self, obs, action, reward, next_obs, terminal, truncated,
                task_index, rng, burn_in=False):
        # step-limit cutoffs are stored as non-terminal so targets still bootstrap
        self.buffer.insert(
            Transition(
                obs=np.asarray(obs, dtype=np.float64),
                action=int(action),
                reward=float(reward),
                next_obs=np.asarray(next_obs, dtype=np.float64),
                terminal=bool(terminal and not truncated),
                task_index=int(task_index),
                time=self.steps_seen,
                episode_id=self.episode_id,
                burn_in=burn_in,
            ),
            rng,
        )
        self.current_task = int(task_index)
        self.steps_seen += 1
        if self.steps_seen % self.cfg.target_sync_every == 0:
            self.target_params = self.params.copy()
        if self.steps_seen % self.cfg.update_every == 0:
            for _ in range(self.cfg.updates_per_cycle):
                self.update(rng)

    def end_episode(self, rng):
        pass

    # -- updates ---------------------------------------------------------

    def update(self, rng: np.random.Generator) -> None:
        """One replay update; no-op until the replay-start threshold."""
        if len(self.buffer) < self.cfg.replay_start:
            return
        if self.is_recurrent:
            grads = self._trace_gradients(rng)
        else:
            grads = self._batch_gradients(rng)
        if grads is None:
            return
        clip_gradients(grads, "elementwise-abs", self.cfg.grad_clip_abs)
        optimizer_step(self.params, grads, self.opt)
        self.updates_done += 1

    def _sample(self, rng):
        if self.buffer.policy == "task-matching":
            return self.buffer.sample(self.cfg.batch_size, rng, self.current_task)
        return self.buffer.sample(self.cfg.batch_size, rng)

    def _batch_gradients(self, rng):
        batch = self._sample(rng)
        B = len(batch)
        obs = np.stack([t.obs for t in batch])
        next_obs = np.stack([t.next_obs for t in batch])
        actions = np.array([t.action for t in batch])
        rewards = np.array([t.reward for t in batch])
        terminal = np.array([t.terminal for t in batch])

        q_next, _, _ = forward(self.spec, self.target_params, next_obs, want_tape=False)
        targets = q_targets(rewards, terminal, q_next.max(axis=1), self.cfg.gamma)
        q, _, tape = forward(self.spec, self.params, obs)
        td = q[np.arange(B), actions] - targets
        dq = np.zeros_like(q)
        dq[np.arange(B), actions] = 2.0 * td / B
        return backward(tape, dq)

    def _trace_gradients(self, rng):
        traces = self.buffer.sample_traces(self.cfg.batch_size, self.cfg.trace_length, rng)
        B = len(traces)
        L = max(len(tr) for tr in traces)
        obs = np.zeros((B, L, self.obs_dim))
        next_obs = np.zeros((B, L, self.obs_dim))
        actions = np.zeros((B, L), dtype=int)
        rewards = np.zeros((B, L))
        terminal = np.zeros((B, L), dtype=bool)
        mask = np.zeros((B, L), dtype=bool)
        for i, trace in enumerate(traces):
            for j, t in enumerate(trace):
                obs[i, j] = t.obs
                next_obs[i, j] = t.next_obs
                actions[i, j] = t.action
                rewards[i, j] = t.reward
                terminal[i, j] = t.terminal
                # burn-in steps warm the state but contribute no loss
                mask[i, j] = not t.burn_in
        if not mask.any():
            return None

        zeros = RecurrentState.zeros(self.cfg.hidden, batch=B)
        q_next, _, _ = forward_sequence(
            self.spec, self.target_params, next_obs, zeros.copy(), want_tape=False
        )
        targets = q_targets(rewards, terminal, q_next.max(axis=2), self.cfg.gamma)
        q, _, tape = forward_sequence(self.spec, self.params, obs, zeros.copy())
        bi, ti = np.nonzero(mask)
        td = q[bi, ti, actions[bi, ti]] - targets[bi, ti]
        dq = np.zeros_like(q)
        dq[bi, ti, actions[bi, ti]] = 2.0 * td / mask.sum()
        return backward(tape, dq)
