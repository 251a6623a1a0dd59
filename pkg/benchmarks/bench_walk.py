"""Benchmark the compiled trajectory kernel against the pure-Python fallback.

Run as: python benchmarks/bench_walk.py [steps] [reps]
"""

import sys
import time

import numpy as np

from revmc import new_distribution
from revmc._walk_py import walk as walk_py
from revmc.sampling import _cumulative_rows

try:
    from revmc._walk import walk as walk_compiled
except ImportError:
    walk_compiled = None


def build_chain(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    W = rng.uniform(0.1, 1.0, (n, n))
    W = (W + W.T) / 2
    P = W / W.sum(axis=1, keepdims=True)
    pi = new_distribution(W.sum(axis=1) / W.sum())
    return P, pi


def time_walk(fn, cum, starts, uniforms, repeat: int = 3) -> float:
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(cum, starts, uniforms)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    steps = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    reps = int(sys.argv[2]) if len(sys.argv) > 2 else 16
    n = 10
    P, _ = build_chain(n)
    cum = _cumulative_rows(P)
    rng = np.random.default_rng(1)
    starts = rng.integers(0, n, reps).astype(np.int64)
    uniforms = rng.random((reps, steps - 1))
    total = reps * (steps - 1)

    t_py = time_walk(walk_py, cum, starts, uniforms)
    print(f"pure-python: {t_py:8.3f} s   {total / t_py / 1e6:8.2f} M transitions/s")
    if walk_compiled is None:
        print("compiled kernel not built; install with the extension to compare")
        return
    t_c = time_walk(walk_compiled, cum, starts, uniforms)
    print(f"compiled:    {t_c:8.3f} s   {total / t_c / 1e6:8.2f} M transitions/s")
    print(f"speedup:     {t_py / t_c:8.1f} x")
    same = np.array_equal(
        walk_py(cum, starts, uniforms), walk_compiled(cum, starts, uniforms)
    )
    print(f"identical trajectories: {same}")


if __name__ == "__main__":
    main()
