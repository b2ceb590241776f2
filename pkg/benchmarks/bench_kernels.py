"""Time the numba kernels against the numpy fallback on identical inputs.

    python benchmarks/bench_kernels.py [--sizes 300 1500 5000] [--repeat 3]

Both backends are called directly (the ITRICH_BACKEND switch only picks the
default), so one process measures both.  Outputs are checked for equality
before any timing is reported.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from itrich import _kernels
from itrich.decompose import erdos_renyi


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def bench(n, p, repeat, swaps_per_edge=10):
    g = erdos_renyi(n, p, np.random.default_rng(n))
    gen = np.random.default_rng(0)
    picks = gen.integers(0, g.m, size=(swaps_per_edge * g.m, 2))
    flips = gen.integers(0, 2, size=len(picks)).astype(np.bool_)
    rows = []

    def swap(kernel):
        work = np.array(g.edges)
        kernel(g.n, work, picks, flips)
        return work

    cases = [
        ("common_neighbors", lambda k: k(g.n, g.edges, g.indptr, g.indices),
         _kernels.common_neighbors_numba, _kernels.common_neighbors_numpy),
        ("double_edge_swap", swap,
         _kernels.double_edge_swap_numba, _kernels.double_edge_swap_numpy),
        ("core_numbers", lambda k: k(g.n, g.indptr, g.indices),
         _kernels.core_numbers_numba, _kernels.core_numbers_numpy),
    ]
    for name, call, fast, slow in cases:
        call(fast)  # compile outside the timed region
        t_fast, a = _best(lambda: call(fast), repeat)
        t_slow, b = _best(lambda: call(slow), repeat)
        assert np.array_equal(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)), name
        rows.append((name, n, g.m, t_fast, t_slow))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[300, 1500, 5000])
    ap.add_argument("--degree", type=float, default=20.0, help="target mean degree")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':<18}{'n':>7}{'m':>9}{'numba s':>11}{'numpy s':>11}{'speedup':>9}")
    for n in args.sizes:
        for name, n_, m, tf, ts in bench(n, min(1.0, args.degree / (n - 1)), args.repeat):
            print(f"{name:<18}{n_:>7}{m:>9}{tf:>11.4f}{ts:>11.4f}{ts / tf:>8.1f}x")


if __name__ == "__main__":
    main()
