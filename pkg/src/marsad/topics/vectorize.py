"""Vocabulary building and TF-IDF weighting.

Weights follow the smoothed scheme: ``TF(t, d)`` is the raw count of ``t``
in ``d`` and ``IDF(t, D) = ln((1 + N) / (1 + df(t))) + 1``, with each
document row L2-normalized afterwards.  Smoothing keeps the weight finite
and nonzero even for terms present in every document.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import AnalysisError

Corpus = Sequence[Sequence[str]]


@dataclass
class Vocabulary:
    terms: list[str]  # sorted lexicographically
    df: np.ndarray  # document frequency per term
    n_docs: int
    index: dict[str, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def idf(self) -> np.ndarray:
        return np.log((1.0 + self.n_docs) / (1.0 + self.df.astype(np.float64))) + 1.0


@dataclass
class WeightedMatrix:
    """Sparse documents x terms matrix in CSR form; rows have unit L2 norm
    (or are all-zero when a document has no in-vocabulary term)."""

    n_rows: int
    n_cols: int
    indptr: np.ndarray  # int64, len n_rows + 1
    indices: np.ndarray  # int64 column ids
    data: np.ndarray  # float64 weights, >= 0

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def triples(self):
        """Iterate (row, col, value)."""
        for i in range(self.n_rows):
            cols, vals = self.row(i)
            for c, v in zip(cols, vals):
                yield i, int(c), float(v)

    def toarray(self) -> np.ndarray:
        dense = np.zeros((self.n_rows, self.n_cols))
        row_of = np.repeat(np.arange(self.n_rows), np.diff(self.indptr))
        dense[row_of, self.indices] = self.data
        return dense

    def rows_dense(self, row_ids: np.ndarray) -> np.ndarray:
        """Dense submatrix of the given rows (used for per-cluster NMF)."""
        sub = np.zeros((len(row_ids), self.n_cols))
        for out_i, i in enumerate(row_ids):
            cols, vals = self.row(int(i))
            sub[out_i, cols] = vals
        return sub


def build_vocabulary(corpus: Corpus, min_df: int = 2, max_df_ratio: float = 0.95) -> Vocabulary:
    """Collect corpus terms, pruning rare (df < min_df) and near-ubiquitous
    (df/N > max_df_ratio) ones.  Terms are sorted for determinism."""
    if not corpus:
        raise AnalysisError("EMPTY_VOCABULARY", "empty corpus")
    n_docs = len(corpus)
    df_counter: Counter[str] = Counter()
    for doc in corpus:
        df_counter.update(set(doc))
    kept = sorted(t for t, df in df_counter.items() if df >= min_df and df / n_docs <= max_df_ratio)
    if not kept:
        raise AnalysisError(
            "EMPTY_VOCABULARY",
            f"no term survives min_df={min_df}, max_df_ratio={max_df_ratio}",
        )
    df = np.array([df_counter[t] for t in kept], dtype=np.int64)
    return Vocabulary(terms=kept, df=df, n_docs=n_docs)


def tfidf_matrix(corpus: Corpus, vocab: Vocabulary) -> WeightedMatrix:
    """Weight the corpus against ``vocab``; rows are L2-normalized."""
    idf = vocab.idf()
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in corpus:
        counts = Counter(t for t in doc if t in vocab.index)
        cols = sorted(vocab.index[t] for t in counts)
        weights = [counts[vocab.terms[c]] * idf[c] for c in cols]
        norm = math.sqrt(sum(w * w for w in weights))
        if norm > 0:
            weights = [w / norm for w in weights]
        indices.extend(cols)
        data.extend(weights)
        indptr.append(len(indices))
    return WeightedMatrix(
        n_rows=len(corpus),
        n_cols=len(vocab),
        indptr=np.asarray(indptr, dtype=np.int64),
        indices=np.asarray(indices, dtype=np.int64),
        data=np.asarray(data, dtype=np.float64),
    )


def choose_k(n_docs: int) -> int:
    """Cluster-count heuristic: ``round(sqrt(n/2))`` clamped to [2, 20].

    Replaceable policy; callers may override k explicitly.
    """
    if n_docs < 2:
        raise AnalysisError("TOO_FEW_DOCS", f"need at least 2 documents, got {n_docs}")
    return max(2, min(20, round(math.sqrt(n_docs / 2.0))))


def word_cloud(corpus: Corpus) -> list[tuple[str, int]]:
    """Raw token counts over the whole corpus, ordered by count descending
    then term ascending."""
    counts: Counter[str] = Counter()
    for doc in corpus:
        counts.update(doc)
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
