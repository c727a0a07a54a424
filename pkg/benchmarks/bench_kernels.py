#!/usr/bin/env python3
"""Benchmark the compiled pixel kernels against the numpy fallback.

The compose kernel runs once per candidate state during refinement, so a
single image analysis executes it hundreds to thousands of times; the
histograms run during partition construction and IoU matching.

    python benchmarks/bench_kernels.py [--size 1024] [--regions 200] [--reps 30]
"""

import argparse
import time

import numpy as np

from regionlogic import _kernels_py

try:
    from regionlogic import _kernels
except ImportError:
    _kernels = None


def make_case(size, regions, seed=0):
    rng = np.random.default_rng(seed)
    image = rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8)
    labels = rng.integers(1, regions + 1, size=(size, size)).astype(np.int32)
    keep = rng.integers(0, 2, size=regions + 1).astype(np.uint8)
    mask = rng.integers(0, 2, size=(size, size)).astype(np.uint8)
    return image, labels, keep, mask


def best_of(fn, reps):
    times = []
    for _ in range(reps):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--size", type=int, default=1024)
    parser.add_argument("--regions", type=int, default=200)
    parser.add_argument("--reps", type=int, default=30)
    args = parser.parse_args()

    image, labels, keep, mask = make_case(args.size, args.regions)
    n = args.regions
    cases = {
        "compose_fill": lambda impl: impl.compose_fill(image, labels, keep, 128, 128, 128),
        "label_histogram": lambda impl: impl.label_histogram(labels, n),
        "masked_label_histogram": lambda impl: impl.masked_label_histogram(labels, mask, n),
    }

    print(f"image {args.size}x{args.size}, {args.regions} regions, best of {args.reps}")
    header = f"{'kernel':<24}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call in cases.items():
        pure = best_of(lambda: call(_kernels_py), args.reps)
        if _kernels is None:
            print(f"{name:<24}{pure * 1e3:>12.3f}{'n/a':>15}{'n/a':>10}")
            continue
        compiled = best_of(lambda: call(_kernels), args.reps)
        out_a = call(_kernels_py)
        out_b = call(_kernels)
        assert np.array_equal(out_a, out_b), f"{name}: implementations disagree"
        print(
            f"{name:<24}{pure * 1e3:>12.3f}{compiled * 1e3:>15.3f}"
            f"{pure / compiled:>9.2f}x"
        )


if __name__ == "__main__":
    main()
