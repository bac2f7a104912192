"""Subtopic pipeline: TF-IDF weighting, K-Means clustering, per-cluster NMF
keyword extraction and word-cloud frequencies."""

from .cluster import Clustering, kmeans
from .factorize import NMFResult, nmf
from .subtopics import (
    ClusterTopic,
    SubtopicSet,
    cluster_factors,
    extract_subtopics,
    subtopic_pipeline,
)
from .vectorize import (
    Vocabulary,
    WeightedMatrix,
    build_vocabulary,
    choose_k,
    tfidf_matrix,
    word_cloud,
)

__all__ = [
    "ClusterTopic",
    "Clustering",
    "NMFResult",
    "SubtopicSet",
    "Vocabulary",
    "WeightedMatrix",
    "build_vocabulary",
    "choose_k",
    "cluster_factors",
    "extract_subtopics",
    "kmeans",
    "nmf",
    "subtopic_pipeline",
    "tfidf_matrix",
    "word_cloud",
]
