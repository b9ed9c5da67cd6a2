#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Both backends consume the same random stream, so outputs are identical; this
script measures the speed gap that justifies shipping the extension.

    python benchmarks/benchmark_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from covertree import backend


def bench(label, fn, reps):
    # one warmup call, then best-of-3 timing
    fn(0)
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        for i in range(reps):
            fn(i + 1)
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def bitgen(seed, i):
    return np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(i,)))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller problem sizes")
    args = parser.parse_args()

    if backend.compiled_kernels is None:
        raise SystemExit("compiled extension not built; nothing to compare")

    scale = 4 if args.quick else 1
    cases = [
        ("poigamma_draw x2000",
         lambda k, i: [k.poigamma_draw(bitgen(1, i), 5.0, 1.0) for _ in range(2000)],
         20 // scale or 1),
        ("walk tau(t): depth=8, t=4",
         lambda k, i: k.walk_inverse_local_time(bitgen(2, i), 8, 4.0, False),
         20 // scale or 1),
        ("walk cover: depth=8",
         lambda k, i: k.walk_cover(bitgen(3, i), 8),
         20 // scale or 1),
        ("field sample: depth=12, t=60",
         lambda k, i: k.rk_field(bitgen(4, i), 12, 60.0, True, None, None, None),
         20 // scale or 1),
        ("gff sample: depth=14",
         lambda k, i: k.gff_max(bitgen(5, i), 14, None),
         20 // scale or 1),
    ]

    print(f"{'kernel':34s} {'compiled':>12s} {'python':>12s} {'speedup':>9s}")
    for label, call, reps in cases:
        t_c = bench(label, lambda i: call(backend.compiled_kernels, i), reps)
        t_p = bench(label, lambda i: call(backend.pykernels, i), max(reps // 4, 1))
        print(f"{label:34s} {t_c * 1e3:10.3f}ms {t_p * 1e3:10.3f}ms {t_p / t_c:8.1f}x")


if __name__ == "__main__":
    main()
