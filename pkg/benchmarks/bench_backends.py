#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the hot paths (multi-start see-saw bounds, coplanar grid scan) on
both backends and prints timings plus agreement checks.

    python benchmarks/bench_backends.py [--quick]

The first numba run includes JIT compilation unless the on-disk cache is
already warm; a warm-up pass is timed separately.
"""

import argparse
import time

import numpy as np

from pmst import _backend, quantum_bound, real_scan_bound, umbrella


def timeit(fn, repeats):
    best = np.inf
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def run_case(name, fn, repeats, results):
    row = {}
    for backend in ("numba", "numpy"):
        try:
            _backend.use_backend(backend)
        except ValueError:
            continue
        seconds, value = timeit(fn, repeats)
        row[backend] = (seconds, value)
    results.append((name, row))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    starts_complex = 64 if args.quick else 256
    starts_real = 64 if args.quick else 256
    resolution = 2e-2 if args.quick else 2e-3
    repeats = 2 if args.quick else 3

    witness, _, _ = umbrella(1.0)

    _backend.use_backend("numba")
    warm_start = time.perf_counter()
    quantum_bound(witness, "complex_qubit", starts=2, seed=0)
    real_scan_bound(witness, resolution=0.5, seed=0, polish_starts=1)
    print(f"numba warm-up (incl. any compilation): "
          f"{time.perf_counter() - warm_start:.2f}s\n")

    results = []
    run_case(
        f"see-saw complex ({starts_complex} starts)",
        lambda: quantum_bound(
            witness, "complex_qubit", starts=starts_complex, seed=1
        ).value,
        repeats,
        results,
    )
    run_case(
        f"see-saw coplanar ({starts_real} starts)",
        lambda: quantum_bound(
            witness, "real_qubit", starts=starts_real, seed=1
        ).value,
        repeats,
        results,
    )
    run_case(
        f"coplanar grid scan (resolution {resolution})",
        lambda: real_scan_bound(witness, resolution=resolution, seed=1),
        repeats,
        results,
    )

    print(f"{'case':<42} {'numba':>10} {'numpy':>10} {'speedup':>8}  agree")
    for name, row in results:
        t_nb, v_nb = row.get("numba", (np.nan, None))
        t_np, v_np = row.get("numpy", (np.nan, None))
        agree = "-"
        if v_nb is not None and v_np is not None:
            agree = "yes" if abs(v_nb - v_np) < 1e-9 else f"diff={abs(v_nb - v_np):.1e}"
        print(
            f"{name:<42} {t_nb:>9.4f}s {t_np:>9.4f}s {t_np / t_nb:>7.1f}x  {agree}"
        )


if __name__ == "__main__":
    main()
