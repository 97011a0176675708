#!/usr/bin/env python3
"""Benchmark the pure-Python kernels against the compiled extension.

Run:  python benchmarks/bench_kernels.py [--repeat N]

Covers the hot loops: the coefficient recurrence (dense integer, sparse
integer, modular), its inverse (exact and residue-only), valuation
extraction, and the subgroup-lattice closure.
"""

from __future__ import annotations

import argparse
import random
import time

import dworklab.kernels._pure as pure

try:
    import dworklab.kernels._speedups as speedups
except ImportError:
    speedups = None


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _tasks():
    rng = random.Random(99)
    dense = [0] + [rng.randint(-50, 50) for _ in range(400)]
    sparse = [0] * 2001
    sparse[1] = sparse[2] = 1
    h_dense = pure.hall_exp(dense, 400)
    modulus = 3**200
    big = 3**700 * 12345677

    from dworklab.groups import _addition_table

    order, flat = _addition_table((1, 1, 1, 1, 1, 1, 1), 2)

    return [
        ("hall_exp dense n=400", lambda k: k.hall_exp(dense, 400)),
        ("hall_exp sparse n=2000", lambda k: k.hall_exp(sparse, 2000)),
        ("hall_exp_mod dense n=400", lambda k: k.hall_exp_mod(dense, 400, modulus)),
        ("hall_log n=400", lambda k: k.hall_log(h_dense)),
        ("hall_log_mod_residues p=3 n=400", lambda k: k.hall_log_mod_residues(h_dense, 3, 400)),
        ("vp_int x~3^700 (x1000)", lambda k: [k.vp_int(big, 3) for _ in range(1000)]),
        ("subgroup lattice order 128", lambda k: k.subgroup_lattice_sizes(order, 2, flat)),
    ]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = [("pure-python", pure)]
    if speedups is not None:
        backends.append(("cython", speedups))
    else:
        print("note: compiled backend not importable; timing pure only")

    width = 36
    header = f"{'task':<{width}}" + "".join(f"{name:>14}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, fn in _tasks():
        times = [_time(lambda k=mod: fn(k), args.repeat) for _, mod in backends]
        row = f"{label:<{width}}" + "".join(f"{t * 1000:>12.1f}ms" for t in times)
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    for label, fn in _tasks():
        results = [fn(mod) for _, mod in backends]
        if len(results) == 2:
            assert results[0] == results[1], f"backend mismatch on {label}"
    print("\nbackend outputs agree on every task")


if __name__ == "__main__":
    main()
