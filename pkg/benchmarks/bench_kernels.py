#!/usr/bin/env python3
"""Compare the compiled kernels against the NumPy fallback.

Run after building the extension in place:

    python setup.py build_ext --inplace
    python benchmarks/bench_kernels.py [--rows 4000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from ruleaug._kernels import available_backends


def _make_problem(rows: int, num_cols: int = 6, cat_cols: int = 4, seed: int = 0):
    rng = np.random.default_rng(seed)
    num = rng.normal(size=(rows, num_cols))
    cat = rng.integers(0, 5, size=(rows, cat_cols), dtype=np.int32)
    inv_range = 1.0 / (num.max(axis=0) - num.min(axis=0))
    num_pred = np.array([[0, 4, 0.0], [1, 3, 0.5], [2, 2, 1.0]], dtype=np.float64)
    cat_pred = np.array([[0, 0, 2], [1, 1, 3]], dtype=np.int32)
    return np.ascontiguousarray(num), np.ascontiguousarray(cat), inv_range, num_pred, cat_pred


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=4000)
    parser.add_argument("--knn-rows", type=int, default=1200)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; run: python setup.py build_ext --inplace")

    num, cat, inv_range, num_pred, cat_pred = _make_problem(args.rows)
    small = _make_problem(args.knn_rows, seed=1)
    members = np.arange(args.rows, dtype=np.int64)

    cases = {
        "clause_mask": lambda impl: impl.clause_mask(num, cat, num_pred, cat_pred),
        "point_distances": lambda impl: impl.point_distances(num, cat, inv_range, members, 0),
        "knn_indices(k=10)": lambda impl: impl.knn_indices(small[0], small[1], small[2], 10),
    }

    print(f"{'kernel':<22}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for case, call in cases.items():
        timings = {}
        results = {}
        for name, impl in backends.items():
            timings[name] = _time(lambda impl=impl: call(impl), args.repeat)
            results[name] = np.asarray(call(impl))
        if len(results) == 2:
            assert np.array_equal(results["pure"], results["compiled"]), f"{case}: backends disagree"
        row = f"{case:<22}" + "".join(f"{timings[n] * 1e3:>12.2f}ms" for n in backends)
        if "compiled" in timings:
            row += f"{timings['pure'] / timings['compiled']:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
