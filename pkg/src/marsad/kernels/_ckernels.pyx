# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""C implementations of the hot iteration kernels.

Must stay semantically identical to `marsad.kernels._pure`; the test suite
cross-checks both backends on random inputs.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def lloyd_iter(
    cnp.int64_t[::1] indptr,
    cnp.int64_t[::1] indices,
    double[::1] data,
    double[:, ::1] centroids,
):
    """One K-Means assignment pass over CSR rows (see _pure.lloyd_iter)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t k = centroids.shape[0]
    cdef Py_ssize_t d = centroids.shape[1]

    labels_arr = np.empty(n, dtype=np.int64)
    sqdists_arr = np.empty(n, dtype=np.float64)
    sums_arr = np.zeros((k, d), dtype=np.float64)
    counts_arr = np.zeros(k, dtype=np.int64)
    cent_sq_arr = np.empty(k, dtype=np.float64)
    dots_arr = np.empty(k, dtype=np.float64)

    cdef cnp.int64_t[::1] labels = labels_arr
    cdef double[::1] sqdists = sqdists_arr
    cdef double[:, ::1] sums = sums_arr
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef double[::1] cent_sq = cent_sq_arr
    cdef double[::1] dots = dots_arr

    cdef Py_ssize_t i, j, p, col, best
    cdef double row_sq, v, dist, best_dist, acc

    for j in range(k):
        acc = 0.0
        for p in range(d):
            acc += centroids[j, p] * centroids[j, p]
        cent_sq[j] = acc

    for i in range(n):
        row_sq = 0.0
        for j in range(k):
            dots[j] = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            v = data[p]
            col = indices[p]
            row_sq += v * v
            for j in range(k):
                dots[j] += v * centroids[j, col]
        best = 0
        best_dist = 0.0
        for j in range(k):
            dist = row_sq + cent_sq[j] - 2.0 * dots[j]
            if dist < 0.0:
                dist = 0.0
            if j == 0 or dist < best_dist:
                best = j
                best_dist = dist
        labels[i] = best
        sqdists[i] = best_dist
        counts[best] += 1
        for p in range(indptr[i], indptr[i + 1]):
            sums[best, indices[p]] += data[p]

    return labels_arr, sqdists_arr, sums_arr, counts_arr


def nmf_mu_iter(
    double[:, ::1] V,
    double[:, ::1] W,
    double[:, ::1] H,
    double eps,
):
    """One multiplicative-update sweep, H then W (see _pure.nmf_mu_iter)."""
    cdef Py_ssize_t m = V.shape[0]
    cdef Py_ssize_t nn = V.shape[1]
    cdef Py_ssize_t r = W.shape[1]
    cdef Py_ssize_t i, j, a, b
    cdef double acc, obj, diff

    gram_arr = np.empty((r, r), dtype=np.float64)
    cdef double[:, ::1] gram = gram_arr
    numerH_arr = np.empty((r, nn), dtype=np.float64)
    cdef double[:, ::1] numerH = numerH_arr
    denomH_arr = np.empty((r, nn), dtype=np.float64)
    cdef double[:, ::1] denomH = denomH_arr
    numerW_arr = np.empty((m, r), dtype=np.float64)
    cdef double[:, ::1] numerW = numerW_arr
    denomW_arr = np.empty((m, r), dtype=np.float64)
    cdef double[:, ::1] denomW = denomW_arr

    # H <- H * (W^T V) / (W^T W H + eps); denominators use the old H
    for a in range(r):
        for b in range(r):
            acc = 0.0
            for i in range(m):
                acc += W[i, a] * W[i, b]
            gram[a, b] = acc
    for a in range(r):
        for j in range(nn):
            acc = 0.0
            for i in range(m):
                acc += W[i, a] * V[i, j]
            numerH[a, j] = acc
    for a in range(r):
        for j in range(nn):
            acc = 0.0
            for b in range(r):
                acc += gram[a, b] * H[b, j]
            denomH[a, j] = acc
    for a in range(r):
        for j in range(nn):
            H[a, j] *= numerH[a, j] / (denomH[a, j] + eps)

    # W <- W * (V H^T) / (W H H^T + eps); denominators use the old W
    for a in range(r):
        for b in range(r):
            acc = 0.0
            for j in range(nn):
                acc += H[a, j] * H[b, j]
            gram[a, b] = acc
    for i in range(m):
        for a in range(r):
            acc = 0.0
            for j in range(nn):
                acc += V[i, j] * H[a, j]
            numerW[i, a] = acc
    for i in range(m):
        for a in range(r):
            acc = 0.0
            for b in range(r):
                acc += W[i, b] * gram[b, a]
            denomW[i, a] = acc
    for i in range(m):
        for a in range(r):
            W[i, a] *= numerW[i, a] / (denomW[i, a] + eps)

    obj = 0.0
    for i in range(m):
        for j in range(nn):
            acc = 0.0
            for a in range(r):
                acc += W[i, a] * H[a, j]
            diff = V[i, j] - acc
            obj += diff * diff
    return obj


def pagerank_iter(
    cnp.int64_t[::1] indptr,
    cnp.int64_t[::1] indices,
    double[::1] trans_w,
    double[::1] ranks,
    double damping,
):
    """One power-iteration sweep (see _pure.pagerank_iter)."""
    cdef Py_ssize_t n = ranks.shape[0]
    cdef Py_ssize_t i, p
    cdef double dangling_mass = 0.0
    cdef double residual = 0.0
    cdef double base

    new_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] new = new_arr

    for i in range(n):
        if indptr[i] == indptr[i + 1]:
            dangling_mass += ranks[i]
        else:
            for p in range(indptr[i], indptr[i + 1]):
                new[indices[p]] += ranks[i] * trans_w[p]

    base = (1.0 - damping) / n
    dangling_mass = damping * dangling_mass / n
    for i in range(n):
        new[i] = damping * new[i] + dangling_mass + base
        residual += fabs(new[i] - ranks[i])
    return new_arr, residual
