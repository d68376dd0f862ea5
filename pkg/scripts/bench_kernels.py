#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the three hot kernels on synthetic inputs of growing size, then times
an end-to-end strategy-comparison workload under whichever backend is
active. Run twice to compare backends:

    python3 scripts/bench_kernels.py
    SDNLB_PURE_KERNELS=1 python3 scripts/bench_kernels.py
"""

import argparse
import time
import warnings

import numpy as np

from sdnlb import _pykernels
from sdnlb.instances import random_instance
from sdnlb.kernels import BACKEND
from sdnlb.load_model import LoadModelParams
from sdnlb.planner import PlannerParams
from sdnlb.sim import generate_trace, run
from sdnlb.strategies import StrategyKind

try:
    from sdnlb import _ckernels
except ImportError:
    _ckernels = None


def bench(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_inputs(n_switches, n_controllers, seed=0):
    rng = np.random.default_rng(seed)
    master = rng.integers(0, n_controllers, size=n_switches).astype(np.int64)
    alpha = rng.uniform(50, 350, size=n_switches)
    hops_sc = rng.integers(0, 8, size=(n_switches, n_controllers)).astype(float)
    peer = rng.integers(1, 25, size=n_controllers).astype(float)
    loads = rng.uniform(100, 5000, size=n_controllers)
    return master, alpha, hops_sc, peer, loads


def run_kernel_benchmarks(repeat):
    impls = [("pure", _pykernels)]
    if _ckernels is not None:
        impls.append(("compiled", _ckernels))

    print(f"{'kernel':<24} {'size':<12} " +
          " ".join(f"{name:>12}" for name, _ in impls) + "  speedup")
    for n, m in ((30, 5), (200, 8), (1000, 16), (5000, 32)):
        master, alpha, hops_sc, peer, loads = kernel_inputs(n, m)
        rows = {
            "simplified_loads": (master, alpha, m),
            "full_loads": (master, alpha, hops_sc, peer, 15.0, 0.03, 0.018,
                           1 / 3, 1 / 3, 1 / 3),
            "candidate_efficiencies": (loads, 0, 200.0,
                                       hops_sc[0].copy(), 0.03),
        }
        for kernel, args in rows.items():
            times = [bench(getattr(impl, kernel), args, repeat)
                     for _, impl in impls]
            speedup = times[0] / times[-1] if len(times) > 1 else 1.0
            cells = " ".join(f"{t * 1e6:>10.1f}us" for t in times)
            print(f"{kernel:<24} N={n:<4} M={m:<3} {cells}  {speedup:>6.1f}x")


def run_end_to_end(seeds, steps):
    params = LoadModelParams()
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for seed in range(seeds):
            state = random_instance(seed, 5, 30, load_mode="simplified",
                                    capacity_factor=1.5)
            trace = generate_trace("uniform-walk", steps, seed, n_switches=30)
            for kind in (StrategyKind.EASM, StrategyKind.MUSM,
                         StrategyKind.CSM, StrategyKind.NSM):
                run(state, kind, trace, params, PlannerParams(seed=seed),
                    load_mode="simplified", zero_load="epsilon", seed=seed)
    elapsed = time.perf_counter() - t0
    print(f"\nend-to-end ({seeds} seeds x 4 strategies x {steps} steps) "
          f"with '{BACKEND}' backend active: {elapsed:.2f}s")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=200,
                        help="best-of repetitions per kernel timing")
    parser.add_argument("--seeds", type=int, default=5,
                        help="end-to-end comparison seeds")
    parser.add_argument("--steps", type=int, default=200,
                        help="steps per end-to-end run")
    args = parser.parse_args()

    print(f"active kernel backend: {BACKEND}")
    if _ckernels is None:
        print("compiled kernels not built; timing the pure backend only")
    run_kernel_benchmarks(args.repeat)
    run_end_to_end(args.seeds, args.steps)


if __name__ == "__main__":
    main()
