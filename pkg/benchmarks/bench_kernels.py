#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Usage::

    python benchmarks/bench_kernels.py [--docs 2000] [--terms 1500] [--k 20]
                                       [--rank 8] [--nodes 3000] [--repeat 5]

Times one sweep of each hot kernel (Lloyd assignment, NMF multiplicative
update, PageRank iteration) on synthetic data sized like a mid-sized
monitoring dataset, for every available backend.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from marsad import kernels


def random_csr(rng, n, d, density):
    dense = rng.random((n, d)) * (rng.random((n, d)) < density)
    mask = dense != 0
    indptr = np.concatenate([[0], np.cumsum(mask.sum(axis=1))]).astype(np.int64)
    indices = np.nonzero(mask)[1].astype(np.int64)
    data = dense[mask].astype(np.float64)
    return indptr, indices, data


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=2000)
    parser.add_argument("--terms", type=int, default=1500)
    parser.add_argument("--k", type=int, default=20)
    parser.add_argument("--rank", type=int, default=8)
    parser.add_argument("--nodes", type=int, default=3000)
    parser.add_argument("--density", type=float, default=0.02)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = kernels.backends()
    print(f"backends available: {', '.join(backends)} (selected: {kernels.BACKEND})")
    rng = np.random.default_rng(0)

    indptr, indices, data = random_csr(rng, args.docs, args.terms, args.density)
    centroids = np.ascontiguousarray(rng.random((args.k, args.terms)))

    # NMF at two regimes: per-cluster scale (small) and whole-corpus scale
    # (large, where BLAS-backed NumPy is expected to win).
    Vs = np.ascontiguousarray(rng.random((20, 15)))
    Ws = np.ascontiguousarray(rng.random((20, 2)))
    Hs = np.ascontiguousarray(rng.random((2, 15)))
    m = max(2, args.docs // args.k)
    V = np.ascontiguousarray(rng.random((m, min(args.terms, 400))))
    W = np.ascontiguousarray(rng.random((m, args.rank)))
    H = np.ascontiguousarray(rng.random((args.rank, V.shape[1])))

    n = args.nodes
    pr_indptr, pr_indices, pr_data = random_csr(rng, n, n, min(0.005, 30 / n))
    out_sums = np.maximum(np.add.reduceat(pr_data, pr_indptr[:-1]) if pr_data.size else np.ones(n), 1e-12)
    trans = pr_data.copy()
    for i in range(n):
        lo, hi = pr_indptr[i], pr_indptr[i + 1]
        if hi > lo:
            trans[lo:hi] = pr_data[lo:hi] / pr_data[lo:hi].sum()
    ranks = np.full(n, 1.0 / n)

    rows = []
    for name, impl in backends.items():
        lloyd = time_call(lambda: impl.lloyd_iter(indptr, indices, data, centroids), args.repeat)
        mu_small = time_call(lambda: impl.nmf_mu_iter(Vs, Ws.copy(), Hs.copy(), 1e-12), args.repeat)
        mu_large = time_call(lambda: impl.nmf_mu_iter(V, W.copy(), H.copy(), 1e-12), args.repeat)
        pr = time_call(lambda: impl.pagerank_iter(pr_indptr, pr_indices, trans, ranks, 0.85), args.repeat)
        rows.append((name, lloyd, mu_small, mu_large, pr))

    header = f"{'backend':<10} {'lloyd_iter':>12} {'nmf_mu (20x15)':>15} {'nmf_mu (large)':>15} {'pagerank_iter':>14}"
    print(header)
    print("-" * len(header))
    for name, lloyd, mu_s, mu_l, pr in rows:
        print(
            f"{name:<10} {lloyd * 1e3:>10.3f}ms {mu_s * 1e6:>12.1f}us {mu_l * 1e3:>13.3f}ms {pr * 1e3:>12.3f}ms"
        )
    if len(rows) == 2:
        by = {r[0]: r for r in rows}
        if "c" in by and "python" in by:
            print("\nspeedup (python / c):")
            labels = ((1, "lloyd_iter"), (2, "nmf_mu (20x15)"), (3, "nmf_mu (large)"), (4, "pagerank_iter"))
            for idx, label in labels:
                print(f"  {label:<15} {by['python'][idx] / by['c'][idx]:6.2f}x")


if __name__ == "__main__":
    main()
