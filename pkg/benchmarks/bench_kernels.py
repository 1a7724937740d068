#!/usr/bin/env python3
"""Benchmark the compiled sampling kernels against the pure-Python reference.

Every kernel runs on identical pre-drawn uniforms through both backends; the
results are asserted equal before timing, so the table can only ever compare
implementations that agree bit for bit.

Usage: python benchmarks/bench_kernels.py [--trials N] [--repeats R]
"""
import argparse
import timeit

import numpy as np

from telesim._kernels import BACKEND, backends


def build_cases(trials: int):
    rng = np.random.default_rng(0)
    u1 = rng.random(trials)
    u2 = rng.random(2 * trials)
    cum = np.cumsum([0.25, 0.25, 0.25, 0.25])
    p_succ = np.array([0.996, 0.99, 0.7, 0.2])
    p_plus = rng.random((2, 3))
    return {
        "count_successes": lambda impl: impl.count_successes(u1, 0.25),
        "draw_categories": lambda impl: impl.draw_categories(u1, cum),
        "teleport_verify": lambda impl: impl.teleport_verify(u2, cum, p_succ),
        "tomography_counts": lambda impl: impl.tomography_counts(u2, 0.5, p_plus),
    }


def normalize(value):
    if isinstance(value, tuple):
        return tuple(normalize(v) for v in value)
    if isinstance(value, list):
        return [normalize(v) for v in value]
    return value


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200_000,
                        help="uniform draws per kernel call (default 200000)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats; the best is reported (default 5)")
    args = parser.parse_args()

    impls = backends()
    cases = build_cases(args.trials)
    print(f"active backend: {BACKEND}; trials per call: {args.trials}")

    if "cython" not in impls:
        print("compiled backend unavailable; timing the pure-Python reference only")

    header = f"{'kernel':<20} " + " ".join(f"{name + ' (ms)':>14}" for name in impls)
    if len(impls) > 1:
        header += f" {'speedup':>9}"
    print(header)
    print("-" * len(header))

    for kernel, call in cases.items():
        results = {name: normalize(call(impl)) for name, impl in impls.items()}
        reference = results["python"]
        for name, value in results.items():
            assert value == reference, f"{kernel}: {name} disagrees with python"

        best = {}
        for name, impl in impls.items():
            times = timeit.repeat(lambda: call(impl), number=1, repeat=args.repeats)
            best[name] = min(times)

        row = f"{kernel:<20} " + " ".join(f"{best[n] * 1e3:>14.3f}" for n in impls)
        if "cython" in best:
            row += f" {best['python'] / best['cython']:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
