"""NumPy implementations of the hot iteration kernels.

This is the fallback backend; `marsad.kernels._ckernels` implements the
same three functions in C (via Cython) with identical semantics.  Keep the
arithmetic here expressed in the same order as the compiled kernels so both
backends agree to floating-point noise.
"""

from __future__ import annotations

import numpy as np


def lloyd_iter(indptr, indices, data, centroids):
    """One K-Means assignment pass over CSR rows.

    Returns ``(labels, sqdists, sums, counts)``: per-row nearest centroid
    (first index wins ties), squared distance to it, per-cluster row sums
    and member counts.  Distances use the expansion
    ``|x|^2 + |c|^2 - 2<x,c>`` clamped at zero.
    """
    n = indptr.shape[0] - 1
    k, d = centroids.shape
    row_of = np.repeat(np.arange(n), np.diff(indptr))
    row_sq = np.zeros(n)
    np.add.at(row_sq, row_of, data * data)
    cent_sq = (centroids * centroids).sum(axis=1)
    dots = np.zeros((n, k))
    if data.shape[0]:
        np.add.at(dots, row_of, data[:, None] * centroids.T[indices])
    dist = row_sq[:, None] + cent_sq[None, :] - 2.0 * dots
    np.maximum(dist, 0.0, out=dist)
    labels = np.argmin(dist, axis=1).astype(np.int64)
    sqdists = dist[np.arange(n), labels]
    sums = np.zeros((k, d))
    if data.shape[0]:
        np.add.at(sums, (labels[row_of], indices), data)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return labels, sqdists, sums, counts


def nmf_mu_iter(V, W, H, eps):
    """One multiplicative-update sweep (H then W, in place).

    Returns the Frobenius objective ``|V - WH|_F^2`` after the sweep.
    """
    numer = W.T @ V
    denom = (W.T @ W) @ H + eps
    H *= numer / denom
    numer = V @ H.T
    denom = W @ (H @ H.T) + eps
    W *= numer / denom
    diff = V - W @ H
    return float((diff * diff).sum())


def pagerank_iter(indptr, indices, trans_w, ranks, damping):
    """One power-iteration sweep over a weight-normalized adjacency CSR.

    ``trans_w`` holds per-edge transition probabilities (weight divided by
    the source's total out-weight); rows of dangling nodes are empty and
    their rank mass is spread uniformly.  Returns ``(new_ranks, l1_residual)``.
    """
    n = ranks.shape[0]
    out_deg = np.diff(indptr)
    new = np.zeros(n)
    if indices.shape[0]:
        src_of = np.repeat(np.arange(n), out_deg)
        np.add.at(new, indices, ranks[src_of] * trans_w)
    dangling_mass = float(ranks[out_deg == 0].sum())
    new = damping * (new + dangling_mass / n) + (1.0 - damping) / n
    residual = float(np.abs(new - ranks).sum())
    return new, residual
