#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Each kernel runs on a representative input with both backends (numba gets an
untimed warmup call so JIT compilation is not billed) and the table reports
best-of-``--repeat`` wall times plus the speedup.  Values are asserted equal
across backends before timing, so the benchmark doubles as a parity smoke
test.

Usage:
    python benchmarks/bench_kernels.py [--n 60] [--repeat 3] [--kernel NAME ...]
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from medianlab._backend import HAS_NUMBA, get_kernels
from medianlab.coarse import _as_line_product
from medianlab.exact import product_median, tree_median
from medianlab.generators import (
    default_shear,
    gen_product,
    gen_relhyp_toy,
    gen_tree,
    sheared_median,
)
from medianlab.hyperbolic import triangle_center_median


def _equalish(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(_equalish(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, np.asarray(b))
    if isinstance(a, float) or isinstance(b, float):
        return abs(float(a) - float(b)) < 1e-12
    return a == b


def build_cases(n: int, seed: int) -> dict:
    """kernel name -> args factory for a size-n tree workload.

    Inputs are built once (with the numpy backend where a kernel output is
    itself an input) so both backends see byte-identical arguments.
    """
    ref = get_kernels("numpy")
    space = gen_tree("random", n=n, seed=seed)
    op = tree_median(space)
    tc_tree = triangle_center_median(space)
    M, M2 = op.table(), tc_tree.table()
    D = space.dist
    par = space.parents
    toy = gen_relhyp_toy(4, (8, 8, 8))
    Dt = toy.space.dist
    sd = ref.side_dist_table(toy.space.parents, Dt)
    pm = np.zeros((1, toy.space.n), dtype=bool)
    pm[0, np.asarray(toy.flat)] = True
    idx = np.arange(n, dtype=np.int64)
    sub = idx[:: max(1, n // 12)]
    MD = ref.min_dist_to_interval_table(M, D)
    IM = ref.interval_members_table(M)
    base = gen_tree("path", n=max(4, n // 4))
    line = gen_tree("path", n=3 * max(4, n // 4) + 1)
    grid = gen_product([base, line])
    std = product_median([tree_median(base), tree_median(line)],
                         product_space=grid)
    sheared = sheared_median(std, default_shear(base, line.n - 1),
                             product_space=grid)
    Ta1, Tb1, f1, n2, D1, D2 = _as_line_product(std)
    Ta2, Tb2, f2, _, _, _ = _as_line_product(sheared)
    dom = sheared.domain_vertices().astype(np.int64)

    return {
        "product_closeness_scan": lambda K: (
            D1, D2, Ta1, Tb1, f1, Ta2, Tb2, f2, n2, dom),
        "m0_scan": lambda K: (M,),
        "cm1_scan": lambda K: (M, D),
        "cm2_scan": lambda K: (M, D),
        "four_point_scan": lambda K: (D,),
        "median_table_scan": lambda K: (D,),
        "interval_members_table": lambda K: (M,),
        "min_dist_to_interval_table": lambda K: (M, D),
        "closeness_scan": lambda K: (M, M2, D, idx),
        "lemma_p1_scan": lambda K: (M, D),
        "lemma_p2_scan": lambda K: (M, D),
        "lemma_p3_scan": lambda K: (M, D, MD, 1),
        "lemma_p4_scan": lambda K: (M, D, MD, IM, 1),
        "lemma_p5_scan": lambda K: (M, D, MD, 1),
        "quasiconvexity_scan": lambda K: (M, D, sub),
        "pair_row": lambda K: (3, 11, n),
        "side_dist_table": lambda K: (par, D),
        "triangle_center_table": lambda K: (sd, Dt),
        "classify_triples_scan": lambda K: (sd, pm, toy.space.n, 2.0),
        "rank2_scan": lambda K: (M,),
        "rank3_scan": lambda K: (M,),
    }


def bench(kernel: str, argf, repeat: int) -> tuple[float, float, bool]:
    npk, nbk = get_kernels("numpy"), get_kernels("numba")
    args_np = argf(npk)
    args_nb = argf(nbk)
    ref = getattr(npk, kernel)(*args_np)
    got = getattr(nbk, kernel)(*args_nb)  # also the JIT warmup
    same = _equalish(ref, got)

    def best(mod, args):
        t = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            getattr(mod, kernel)(*args)
            t = min(t, time.perf_counter() - t0)
        return t

    return best(npk, args_np), best(nbk, args_nb), same


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=60, help="tree size (default 60)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3, help="timed runs per backend")
    ap.add_argument("--kernel", action="append", default=None,
                    help="benchmark only this kernel (repeatable)")
    args = ap.parse_args(argv)
    if not HAS_NUMBA:
        print("numba is not importable; nothing to compare against", file=sys.stderr)
        return 1
    cases = build_cases(args.n, args.seed)
    names = args.kernel or sorted(cases)
    unknown = [k for k in names if k not in cases]
    if unknown:
        print(f"unknown kernels: {', '.join(unknown)}", file=sys.stderr)
        return 1
    w = max(len(k) for k in names)
    print(f"workload: random tree n={args.n} (plus a rel-hyp toy for the "
          f"centre/classify kernels), best of {args.repeat}")
    print(f"{'kernel':<{w}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}  parity")
    for k in names:
        t_np, t_nb, same = bench(k, cases[k], args.repeat)
        ratio = t_np / t_nb if t_nb > 0 else float("inf")
        print(f"{k:<{w}}  {t_np * 1e3:>8.2f}ms  {t_nb * 1e3:>8.2f}ms  "
              f"{ratio:>7.1f}x  {'ok' if same else 'MISMATCH'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
