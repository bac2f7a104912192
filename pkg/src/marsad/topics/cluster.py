"""K-Means over TF-IDF rows: k-means++ seeding plus Lloyd iterations.

The assignment/accumulation pass runs through `marsad.kernels`; everything
seeded from a single integer so runs are reproducible.
"""

from __future__ import annotations

import numpy as np

from .. import kernels
from ..errors import AnalysisError
from .vectorize import WeightedMatrix


from dataclasses import dataclass, field


@dataclass
class Clustering:
    k: int
    assignments: np.ndarray  # int64, doc -> cluster id
    centroids: np.ndarray  # (k, d)
    inertia: float
    n_iter: int
    inertia_trace: list[float] = field(default_factory=list)


def _as_csr(matrix) -> tuple[np.ndarray, np.ndarray, np.ndarray, int, int]:
    if isinstance(matrix, WeightedMatrix):
        return matrix.indptr, matrix.indices, matrix.data, matrix.n_rows, matrix.n_cols
    dense = np.ascontiguousarray(np.asarray(matrix, dtype=np.float64))
    n, d = dense.shape
    mask = dense != 0.0
    counts = mask.sum(axis=1)
    indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    indices = np.nonzero(mask)[1].astype(np.int64)
    data = dense[mask].astype(np.float64)
    return indptr, indices, data, n, d


def _sqdist_to_centroid(indptr, indices, data, row_sq, centroid) -> np.ndarray:
    """Squared distance of every CSR row to one dense centroid."""
    n = indptr.shape[0] - 1
    dots = np.zeros(n)
    if data.shape[0]:
        row_of = np.repeat(np.arange(n), np.diff(indptr))
        np.add.at(dots, row_of, data * centroid[indices])
    d = row_sq + float(centroid @ centroid) - 2.0 * dots
    np.maximum(d, 0.0, out=d)
    return d


def _row_dense(indptr, indices, data, d, i) -> np.ndarray:
    out = np.zeros(d)
    lo, hi = indptr[i], indptr[i + 1]
    out[indices[lo:hi]] = data[lo:hi]
    return out


def _canonical_order(indptr, indices, data, n) -> list[int]:
    """Row ids sorted by row content.

    Seeding draws are made over this ordering, so the points k-means++
    selects depend on the data multiset and the seed, never on input row
    order; permuting documents permutes labels but not the partition.
    """
    keys = []
    for i in range(n):
        lo, hi = indptr[i], indptr[i + 1]
        keys.append((tuple(indices[lo:hi].tolist()), tuple(data[lo:hi].tolist())))
    return sorted(range(n), key=keys.__getitem__)


def _kmeanspp_init(indptr, indices, data, n, d, k, rng) -> np.ndarray:
    """k-means++ seeding: first centroid uniform, the rest D^2-sampled."""
    row_sq = np.zeros(n)
    if data.shape[0]:
        row_of = np.repeat(np.arange(n), np.diff(indptr))
        np.add.at(row_sq, row_of, data * data)
    order = np.asarray(_canonical_order(indptr, indices, data, n))
    centroids = np.zeros((k, d))
    first = int(order[rng.integers(n)])
    centroids[0] = _row_dense(indptr, indices, data, d, first)
    closest = _sqdist_to_centroid(indptr, indices, data, row_sq, centroids[0])
    for j in range(1, k):
        ordered = closest[order]
        total = ordered.sum()
        if total <= 0.0:
            # all remaining points coincide with chosen centroids
            pick = int(order[rng.integers(n)])
        else:
            target = rng.random() * total
            pos = int(np.searchsorted(np.cumsum(ordered), target, side="right"))
            pick = int(order[min(pos, n - 1)])
        centroids[j] = _row_dense(indptr, indices, data, d, pick)
        np.minimum(closest, _sqdist_to_centroid(indptr, indices, data, row_sq, centroids[j]), out=closest)
    return centroids


def kmeans(matrix, k: int, seed: int = 0, max_iter: int = 100, tol: float = 1e-4) -> Clustering:
    """Cluster rows of ``matrix`` (WeightedMatrix or dense array).

    Deterministic given ``seed``.  Stops when the centroid shift falls
    below ``tol`` (Frobenius norm) or after ``max_iter`` rounds; the
    recorded inertia trace is non-increasing.  Empty clusters are repaired
    by reseeding to the point farthest from its assigned centroid.
    """
    indptr, indices, data, n, d = _as_csr(matrix)
    if k < 1 or k > n:
        raise AnalysisError("K_EXCEEDS_DOCS", f"k={k} with {n} documents")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(indptr, indices, data, n, d, k, rng)

    trace: list[float] = []
    labels = np.zeros(n, dtype=np.int64)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        labels, sqdists, sums, counts = kernels.lloyd_iter(indptr, indices, data, centroids)
        trace.append(float(sqdists.sum()))
        new_centroids = np.where(counts[:, None] > 0, sums / np.maximum(counts, 1)[:, None], centroids)
        # Empty-cluster repair: reseed on the farthest outlier.
        empties = np.nonzero(counts == 0)[0]
        if empties.shape[0]:
            stolen = sqdists.copy()
            for j in empties:
                far = int(np.argmax(stolen))
                new_centroids[j] = _row_dense(indptr, indices, data, d, far)
                stolen[far] = -np.inf
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum()))
        centroids = new_centroids
        if shift < tol:
            break

    labels, sqdists, _, _ = kernels.lloyd_iter(indptr, indices, data, centroids)
    inertia = float(sqdists.sum())
    trace.append(inertia)
    return Clustering(
        k=k,
        assignments=labels,
        centroids=centroids,
        inertia=inertia,
        n_iter=n_iter,
        inertia_trace=trace,
    )
