"""Subtopic extraction: cluster the TF-IDF matrix, factor each cluster's
rows with NMF, and rank terms per cluster by their strongest component."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import AnalysisError
from .cluster import Clustering, kmeans
from .factorize import NMFResult, nmf
from .vectorize import Corpus, Vocabulary, WeightedMatrix, build_vocabulary, choose_k, tfidf_matrix

DEFAULT_RANK = 2


@dataclass
class ClusterTopic:
    cluster_id: int
    doc_count: int
    top_terms: list[tuple[str, float]]  # weight-descending, ties lexicographic


@dataclass
class SubtopicSet:
    k: int
    clusters: list[ClusterTopic]
    factors: dict[int, NMFResult]
    seed: int


def _cluster_seed(seed: int, cluster_id: int) -> int:
    return (seed * 1_000_003 + cluster_id + 1) % (2**32)


def cluster_factors(
    matrix: WeightedMatrix,
    clustering: Clustering,
    rank: int = DEFAULT_RANK,
    seed: int = 0,
    max_iter: int = 200,
) -> dict[int, NMFResult]:
    """Per-cluster NMF over the cluster's row submatrix.

    The requested rank is clamped to the submatrix dimensions so tiny
    clusters still factor.
    """
    factors: dict[int, NMFResult] = {}
    for cid in range(clustering.k):
        rows = np.nonzero(clustering.assignments == cid)[0]
        sub = matrix.rows_dense(rows)
        r = max(1, min(rank, sub.shape[0], sub.shape[1]))
        factors[cid] = nmf(sub, rank=r, seed=_cluster_seed(seed, cid), max_iter=max_iter)
    return factors


def extract_subtopics(
    clustering: Clustering,
    factors: dict[int, NMFResult],
    vocab: Vocabulary,
    top_m: int = 10,
) -> SubtopicSet:
    """Rank each cluster's terms by the max over its NMF component rows."""
    clusters = []
    for cid in range(clustering.k):
        H = factors[cid].H
        weights = H.max(axis=0)
        order = sorted(range(len(vocab)), key=lambda t: (-weights[t], vocab.terms[t]))
        top = [(vocab.terms[t], float(weights[t])) for t in order[:top_m]]
        doc_count = int((clustering.assignments == cid).sum())
        clusters.append(ClusterTopic(cluster_id=cid, doc_count=doc_count, top_terms=top))
    return SubtopicSet(k=clustering.k, clusters=clusters, factors=factors, seed=-1)


def subtopic_pipeline(
    corpus: Corpus,
    seed: int = 0,
    k: int | None = None,
    rank: int = DEFAULT_RANK,
    min_df: int = 2,
    max_df_ratio: float = 0.95,
    top_m: int = 10,
) -> tuple[SubtopicSet, Clustering, Vocabulary]:
    """Full chain: vocabulary -> TF-IDF -> K-Means -> per-cluster NMF.

    ``(corpus, seed)`` fully determines the result; ``k`` defaults to the
    dataset-size heuristic.
    """
    if len(corpus) < 2:
        raise AnalysisError("TOO_FEW_DOCS", f"need at least 2 documents, got {len(corpus)}")
    vocab = build_vocabulary(corpus, min_df=min_df, max_df_ratio=max_df_ratio)
    matrix = tfidf_matrix(corpus, vocab)
    if k is None:
        k = choose_k(len(corpus))
    k = min(k, matrix.n_rows)
    clustering = kmeans(matrix, k=k, seed=seed)
    factors = cluster_factors(matrix, clustering, rank=rank, seed=seed)
    subtopics = extract_subtopics(clustering, factors, vocab, top_m=top_m)
    subtopics.seed = seed
    return subtopics, clustering, vocab
