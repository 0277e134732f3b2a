"""Throughput comparison of the compiled kernel core and its fallback.

Run as: python3 benchmarks/kernel_bench.py [--rows N] [--repeats K]
"""
from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from poincrep import _kernels


def bench(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--rows", type=int, default=400_000)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()

    impls = _kernels.implementations()
    if len(impls) < 2:
        print("compiled extension not built; nothing to compare")

    rng = np.random.default_rng(0)
    vectors = rng.normal(size=(args.rows, 4))
    colors = rng.uniform(0.05, 1.0, size=(args.rows // 10, 10))
    tri = np.array(
        [[i, j, k] for i in range(3) for j in range(i + 1, 6) for k in range(j + 1, 10)][:10],
        dtype=np.int64,
    )
    simp = np.ones(1)

    jobs = {
        "classify_radius": lambda impl: impl.classify_radius(vectors, 1e-9),
        "statesum_integrand": lambda impl: impl.statesum_integrand(
            colors, tri, tri, simp, True, 1, 0.5
        ),
    }

    print(f"rows: {args.rows} (integrand batch {args.rows // 10}), median of {args.repeats}")
    print(f"{'kernel':<20} {'backend':<10} {'seconds':>10} {'Mrows/s':>9}")
    baselines: dict[str, float] = {}
    for job_name, job in jobs.items():
        n = vectors.shape[0] if job_name == "classify_radius" else colors.shape[0]
        for name, impl in impls.items():
            seconds = bench(lambda: job(impl), args.repeats)
            rate = n / seconds / 1e6
            note = ""
            if name == "reference":
                baselines[job_name] = seconds
            elif job_name in baselines:
                note = f"  ({baselines[job_name] / seconds:.2f}x reference)"
            print(f"{job_name:<20} {name:<10} {seconds:>10.4f} {rate:>9.2f}{note}")


if __name__ == "__main__":
    main()
