"""Proximal Policy Optimisation: actor-critic with a clipped surrogate,
generalised advantage estimation, and Adam updates.

The actor logits and the critic value share one network; the terminal linear
layer has action_count + 1 outputs (logits then value).  The update
maximises the clipped surrogate minus a value-error term (coefficient 1)
plus an entropy bonus (coefficient 0.01), with gradients norm-clipped at 1.
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
    log_softmax,
    optimizer_step,
)
from ..nncore.network import spec_mlp, spec_recurrent


def gae_advantages(rewards, values, terminals, gamma, lam, bootstrap_value=0.0):
    """Generalised advantage estimation over one rollout.

    rewards/values/terminals have equal length T; bootstrap_value stands in
    for V(s_T) when the rollout does not end in a true terminal.  Returns
    (advantages, returns) with returns = advantages + values.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    terminals = np.asarray(terminals, dtype=bool)
    if not (len(rewards) == len(values) == len(terminals)):
        raise ConfigurationError("rollout arrays must have equal length")
    T = len(rewards)
    advantages = np.zeros(T)
    last_adv = 0.0
    for t in range(T - 1, -1, -1):
        next_value = bootstrap_value if t == T - 1 else values[t + 1]
        if terminals[t]:
            delta = rewards[t] - values[t]
            last_adv = delta
        else:
            delta = rewards[t] + gamma * next_value - values[t]
            last_adv = delta + gamma * lam * last_adv
        advantages[t] = last_adv
    return advantages, advantages + values


@dataclass
class PpoConfig:
    hidden: int = 80
    recurrent: bool = False
    gamma: float = 0.99
    learning_rate: float = 0.00025
    batch_size: int = 34  # minibatch within each epoch
    epochs: int = 10
    update_every: int | None = None  # steps between updates; None = episode end
    gae_lambda: float = 0.95
    clip_coef: float = 0.10
    value_coef: float = 1.0
    entropy_coef: float = 0.01
    grad_clip_norm: float = 1.0

    def __post_init__(self):
        if self.clip_coef <= 0:
            raise ConfigurationError("clip coefficient must be positive")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigurationError("epochs and batch size must be positive")
        if self.update_every is not None and self.update_every < 1:
            raise ConfigurationError("update_every must be positive when given")

    @classmethod
    def for_domain(cls, domain: str, **overrides) -> "PpoConfig":
        if domain == "pocman":
            overrides.setdefault("recurrent", True)
            overrides.setdefault("epochs", 3)
            overrides.setdefault("update_every", 100)
        return cls(**overrides)


def ppo_head_gradient(out, actions, old_log_probs, advantages, returns, cfg):
    """Loss and d(loss)/d(network output) for one minibatch.

    out is (M, A+1): action logits then state value.  The loss is
    -mean(clipped surrogate) + value_coef * mean((V - R)^2)
    - entropy_coef * mean(entropy); minimised.
    """
    M = out.shape[0]
    logits = out[:, :-1]
    values = out[:, -1]
    logp_all = log_softmax(logits)
    probs = np.exp(logp_all)
    idx = np.arange(M)
    logp = logp_all[idx, actions]
    ratio = np.exp(logp - old_log_probs)

    lo, hi = 1.0 - cfg.clip_coef, 1.0 + cfg.clip_coef
    surrogate = np.minimum(ratio * advantages, np.clip(ratio, lo, hi) * advantages)
    value_err = values - returns
    entropy = -(probs * logp_all).sum(axis=1)
    loss = (
        -surrogate.mean()
        + cfg.value_coef * np.mean(value_err**2)
        - cfg.entropy_coef * entropy.mean()
    )

    # surrogate gradient flows only where the unclipped branch is active
    clipped_out = ((advantages > 0) & (ratio > hi)) | ((advantages < 0) & (ratio < lo))
    coef = np.where(clipped_out, 0.0, ratio * advantages) / M
    onehot = np.zeros_like(probs)
    onehot[idx, actions] = 1.0
    dlogits = -coef[:, None] * (onehot - probs)
    dlogits += cfg.entropy_coef / M * probs * (logp_all + entropy[:, None])

    dout = np.empty_like(out)
    dout[:, :-1] = dlogits
    dout[:, -1] = 2.0 * cfg.value_coef * value_err / M
    return loss, dout


class PpoLearner:
    is_recurrent: bool

    def __init__(self, obs_dim: int, action_count: int, cfg: PpoConfig,
                 rng: np.random.Generator):
        self.cfg = cfg
        self.obs_dim = obs_dim
        self.action_count = action_count
        self.is_recurrent = cfg.recurrent
        out_dim = action_count + 1  # actor logits + critic value
        if cfg.recurrent:
            self.spec = spec_recurrent(obs_dim, cfg.hidden, out_dim)
        else:
            self.spec = spec_mlp(obs_dim, cfg.hidden, out_dim)
        self.params = glorot_init(self.spec, rng)
        self.opt = OptimizerState.adam(self.params, learning_rate=cfg.learning_rate)
        self.rstate = None
        self.steps_seen = 0
        self.updates_done = 0
        self.episode_id = -1
        self._rollout: list[dict] = []
        self._pending: dict | None = None

    def start_episode(self):
        self.episode_id += 1
        if self.is_recurrent:
            self.rstate = RecurrentState.zeros(self.cfg.hidden)

    def _net_out(self, obs, advance=True):
        if self.is_recurrent:
            state_before = self.rstate.copy()
            out, state, _ = forward(self.spec, self.params, obs, self.rstate, want_tape=False)
            if advance:
                self.rstate = state
            return out, state_before
        out, _, _ = forward(self.spec, self.params, obs, want_tape=False)
        return out, None

    def advance_state(self, obs) -> None:
        if self.is_recurrent:
            self._net_out(obs)

    def act_with_info(self, obs, rng: np.random.Generator):
        """Sample from the actor head; returns (action, log_prob, value)."""
        out, state_before = self._net_out(obs)
        logp_all = log_softmax(out[:-1])
        probs = np.exp(logp_all)
        probs = probs / probs.sum()  # guard cumulative rounding
        action = int(rng.choice(self.action_count, p=probs))
        self._pending = {
            "obs": np.asarray(obs, dtype=np.float64),
            "action": action,
            "log_prob": float(logp_all[action]),
            "value": float(out[-1]),
            "state": state_before,
        }
        return action, float(logp_all[action]), float(out[-1])

    def act(self, obs, rng: np.random.Generator) -> int:
        return self.act_with_info(obs, rng)[0]

    def action_distribution(self, obs, exploration: float | None = None) -> np.ndarray:
        """Actor probabilities from a fresh state, for the spread metric.
        (exploration is accepted for interface parity; a stochastic actor
        has no separate exploration rate.)"""
        if self.is_recurrent:
            out, _, _ = forward(self.spec, self.params, obs,
                                RecurrentState.zeros(self.cfg.hidden), want_tape=False)
        else:
            out, _, _ = forward(self.spec, self.params, obs, want_tape=False)
        logits = out[:-1]
        e = np.exp(logits - logits.max())
        return e / e.sum()

    def observe(self, obs, action, reward, next_obs, terminal, truncated,
                task_index, rng, burn_in=False):
        self.steps_seen += 1
        if burn_in:
            self._pending = None
            return
        if self._pending is None or self._pending["action"] != int(action):
            raise ConfigurationError("observe() must follow act() on the same step")
        entry = self._pending
        self._pending = None
        entry.update(
            reward=float(reward),
            terminal=bool(terminal and not truncated),
            next_obs=np.asarray(next_obs, dtype=np.float64),
        )
        self._rollout.append(entry)
        if self.cfg.update_every is not None and len(self._rollout) >= self.cfg.update_every:
            self.update(rng)

    def end_episode(self, rng):
        if self._rollout:
            self.update(rng)

    # -- updates ---------------------------------------------------------

    def _bootstrap_value(self) -> float:
        last = self._rollout[-1]
        if last["terminal"]:
            return 0.0
        if self.is_recurrent:
            out, _, _ = forward(
                self.spec, self.params, last["next_obs"], self.rstate.copy(),
                want_tape=False,
            )
        else:
            out, _, _ = forward(self.spec, self.params, last["next_obs"], want_tape=False)
        return float(out[-1])

    def update(self, rng: np.random.Generator) -> None:
        rollout = self._rollout
        if not rollout:
            return
        T = len(rollout)
        advantages, returns = gae_advantages(
            [e["reward"] for e in rollout],
            [e["value"] for e in rollout],
            [e["terminal"] for e in rollout],
            self.cfg.gamma,
            self.cfg.gae_lambda,
            bootstrap_value=self._bootstrap_value(),
        )
        obs = np.stack([e["obs"] for e in rollout])
        actions = np.array([e["action"] for e in rollout])
        old_logp = np.array([e["log_prob"] for e in rollout])

        M = self.cfg.batch_size
        for _ in range(self.cfg.epochs):
            if self.is_recurrent:
                # contiguous chunks replayed from their collection-time states
                starts = list(range(0, T, M))
                order = rng.permutation(len(starts))
                for k in order:
                    s = starts[int(k)]
                    sl = slice(s, min(s + M, T))
                    self._chunk_step(
                        obs[sl], actions[sl], old_logp[sl], advantages[sl],
                        returns[sl], rollout[s]["state"],
                    )
            else:
                order = rng.permutation(T)
                for s in range(0, T, M):
                    sel = order[s : s + M]
                    self._minibatch_step(
                        obs[sel], actions[sel], old_logp[sel], advantages[sel],
                        returns[sel],
                    )
        self._rollout = []
        self.updates_done += 1

    def _minibatch_step(self, obs, actions, old_logp, advantages, returns):
        out, _, tape = forward(self.spec, self.params, obs)
        _, dout = ppo_head_gradient(out, actions, old_logp, advantages, returns, self.cfg)
        grads = backward(tape, dout)
        clip_gradients(grads, "global-norm", self.cfg.grad_clip_norm)
        optimizer_step(self.params, grads, self.opt)

    def _chunk_step(self, obs, actions, old_logp, advantages, returns, start_state):
        state = RecurrentState(start_state.h[None, :].copy(), start_state.c[None, :].copy())
        out, _, tape = forward_sequence(self.spec, self.params, obs[None, :, :], state)
        out = out[0]
        _, dout = ppo_head_gradient(out, actions, old_logp, advantages, returns, self.cfg)
        grads = backward(tape, dout[None, :, :])
        clip_gradients(grads, "global-norm", self.cfg.grad_clip_norm)
        optimizer_step(self.params, grads, self.opt)
