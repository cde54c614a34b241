"""Single-task DQN sanity run at the published defaults (criterion probe)."""

import sys
import time

import numpy as np

from polylife.envs import make_env
from polylife.envs.domains import default_cartpole_task
from polylife.learners import DqnConfig, DqnLearner
from polylife.reuse.engine import run_episode


def run(total_steps=1_500_000, seed=0, log_every=50_000):
    task = default_cartpole_task()
    env = make_env(task)
    learner = DqnLearner(4, 2, DqnConfig(), np.random.default_rng(seed))
    env_rng = np.random.default_rng(seed + 1)
    policy_rng = np.random.default_rng(seed + 2)
    returns = []
    steps_done = 0
    t0 = time.time()
    next_log = log_every
    while steps_done < total_steps:
        ret, steps = run_episode(env, learner, 0, policy_rng, env_rng)
        returns.append(ret)
        steps_done += steps
        if steps_done >= next_log:
            recent = np.mean(returns[-50:])
            print(f"steps={steps_done:>9} episodes={len(returns):>7} "
                  f"recent50={recent:7.1f} last10={np.mean(returns[-10:]):7.1f} "
                  f"updates={learner.updates_done:>8} elapsed={time.time()-t0:6.1f}s",
                  flush=True)
            next_log += log_every
    print("FINAL last-10 mean:", np.mean(returns[-10:]))
    return returns


if __name__ == "__main__":
    steps = int(sys.argv[1]) if len(sys.argv) > 1 else 1_500_000
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    run(steps, seed)
