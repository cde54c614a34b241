"""Benchmark the compiled kernels against the NumPy fallback.

Run:  python benchmarks/bench_backends.py [--repeats N]

Times the individual kernels at the shapes the learners use (batch 10,
hidden 80) plus an end-to-end DQN update loop on each backend.
"""

import argparse
import importlib
import os
import sys
import time

import numpy as np


def best_of(fn, repeats, inner=50):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        times.append((time.perf_counter() - start) / inner)
    return min(times)


def kernel_benchmarks(K, rng):
    B, I, H, O = 10, 4, 80, 2
    X = rng.normal(size=(B, H))
    W = rng.normal(size=(H, H))
    b = rng.normal(size=H)
    dZ = rng.normal(size=(B, H))
    Wx = rng.normal(size=(4 * H, H))
    Wh = rng.normal(size=(4 * H, H))
    b4 = rng.normal(size=4 * H)
    h = rng.normal(size=(B, H))
    c = rng.normal(size=(B, H))
    p = rng.normal(size=(H, H))
    g = rng.normal(size=(H, H))
    m = np.zeros((H, H))
    v = np.zeros((H, H))
    _, _, gates, ct = K.lstm_forward(X, Wx, Wh, b4, h, c)
    dh = rng.normal(size=(B, H))
    dc = rng.normal(size=(B, H))
    return {
        "dense_forward 10x80x80": lambda: K.dense_forward(X, W, b),
        "dense_backward 10x80x80": lambda: K.dense_backward(X, W, dZ),
        "lstm_forward 10x80": lambda: K.lstm_forward(X, Wx, Wh, b4, h, c),
        "lstm_backward 10x80": lambda: K.lstm_backward(X, Wx, Wh, h, c, gates, ct, dh, dc),
        "adadelta_step 80x80": lambda: K.adadelta_step(p, g, m, v, 0.95, 1e-6, 0.1),
        "adam_step 80x80": lambda: K.adam_step(p, g, m, v, 5, 2.5e-4, 0.9, 0.999, 1e-8),
    }


def dqn_update_loop(n_updates=200, seed=0):
    from polylife.learners import DqnConfig, DqnLearner

    rng = np.random.default_rng(seed)
    learner = DqnLearner(
        4, 2,
        DqnConfig(replay_start=1, update_every=10**9, buffer_capacity=5000),
        np.random.default_rng(seed),
    )
    obs = rng.normal(size=(500, 4))
    for i in range(500):
        learner.observe(obs[i], int(rng.integers(2)), 1.0, obs[(i + 1) % 500],
                        False, False, 0, rng)
    start = time.perf_counter()
    for _ in range(n_updates):
        learner.update(rng)
    return (time.perf_counter() - start) / n_updates


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    from polylife.nncore import _kernels_py

    backends = {"python": _kernels_py}
    try:
        backends["compiled"] = importlib.import_module("polylife.nncore._kernels")
    except ImportError:
        print("compiled backend unavailable; benchmarking the fallback only")

    rng = np.random.default_rng(1)
    results = {}
    for name, module in backends.items():
        for label, fn in kernel_benchmarks(module, rng).items():
            results.setdefault(label, {})[name] = best_of(fn, args.repeats)

    width = max(len(k) for k in results)
    header = f"{'kernel'.ljust(width)}  {'python':>12}  {'compiled':>12}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, per_backend in results.items():
        py_t = per_backend["python"]
        c_t = per_backend.get("compiled")
        if c_t is None:
            print(f"{label.ljust(width)}  {py_t * 1e6:10.2f}us")
            continue
        print(
            f"{label.ljust(width)}  {py_t * 1e6:10.2f}us  {c_t * 1e6:10.2f}us"
            f"  {py_t / c_t:7.2f}x"
        )

    print()
    for name in backends:
        os.environ["POLYLIFE_BACKEND"] = name
        # re-run in a fresh interpreter so the backend choice takes effect
        import subprocess

        out = subprocess.run(
            [sys.executable, "-c",
             "from benchmarks.bench_backends import dqn_update_loop;"
             "print(dqn_update_loop())"],
            capture_output=True, text=True, cwd=os.path.dirname(os.path.dirname(__file__)),
            env=os.environ,
        )
        if out.returncode == 0:
            per_update = float(out.stdout.strip())
            print(f"dqn update loop [{name}]: {per_update * 1e6:.1f}us per update")
        else:
            print(f"dqn update loop [{name}] failed: {out.stderr.strip()[:200]}")
    os.environ.pop("POLYLIFE_BACKEND", None)


if __name__ == "__main__":
    main()
