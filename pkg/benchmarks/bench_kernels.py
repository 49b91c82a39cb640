#!/usr/bin/env python3
"""Benchmark the compiled ranking kernel against the numpy fallback.

Times the leave-one-out AA evaluation on a synthetic snapshot and prints
predictions/second for both implementations plus the speedup. Sizes
default to the scale proxy used by the throughput check (|V| = 3500,
|U| = 100k); shrink them for a quick look:

    python benchmarks/bench_kernels.py --articles 800 --cases 20000
"""

import argparse
import time

import numpy as np

from cocitebench import _rank_py
from cocitebench.cocitation import build_cocitation
from cocitebench.kernels import HAVE_COMPILED
from cocitebench.synth import random_incidence


def case_batch(M, case_indices):
    flat, ptr = [], [0]
    for u in case_indices:
        sl = slice(M.indptr[u], M.indptr[u + 1])
        flat.extend(int(x) for x in M.indices[sl])
        ptr.append(len(flat))
    return np.asarray(flat, dtype=np.int64), np.asarray(ptr, dtype=np.int64)


def run(impl, arrays, cases_flat, case_ptr, methods):
    t0 = time.perf_counter()
    impl.rank_case_batch(
        arrays["indptr"], arrays["indices"], arrays["data"], arrays["data_aa"],
        arrays["dscore"], cases_flat, case_ptr, *methods,
    )
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--articles", type=int, default=3500)
    parser.add_argument("--cases", type=int, default=100_000)
    parser.add_argument("--eval-cases", type=int, default=4000)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--all-methods", action="store_true",
                        help="time CN+AA+Degree instead of AA only")
    args = parser.parse_args()

    print(f"building snapshot: |V|={args.articles}, |U|={args.cases}")
    M = random_incidence(args.cases, args.articles, args.seed, row_range=(3, 15))
    cc = build_cocitation(M)
    arrays = cc.scoring_arrays()
    print(f"co-citation matrix: {cc.C.nnz:,} nonzeros")

    rng = np.random.default_rng(0)
    rows = np.sort(rng.choice(args.cases, size=min(args.eval_cases, args.cases),
                              replace=False))
    cases_flat, case_ptr = case_batch(M, rows)
    n_targets = len(cases_flat)
    methods = (True, True, True) if args.all_methods else (False, True, False)
    per_pass = 3 if args.all_methods else 1

    impls = []
    if HAVE_COMPILED:
        from cocitebench import _rank_ext

        impls.append(("cython", _rank_ext))
    else:
        print("compiled kernel not available; numpy only")
    impls.append(("numpy fallback", _rank_py))

    results = {}
    for name, impl in impls:
        run(impl, arrays, cases_flat[: max(1, n_targets // 50)],
            case_ptr[: max(2, len(case_ptr) // 50)], methods)  # warm-up
        dt = run(impl, arrays, cases_flat, case_ptr, methods)
        rate = per_pass * n_targets / dt
        results[name] = rate
        print(f"{name:>16}: {dt:6.2f}s  {rate:>12,.0f} predictions/s")
    if len(results) == 2:
        speedup = results["cython"] / results["numpy fallback"]
        print(f"{'speedup':>16}: {speedup:.2f}x")


if __name__ == "__main__":
    main()
