"""Classifier baselines, pluggable adapters, post analysis and the
annotation feedback loop."""

from .adapters import AdapterRegistry, ClassifierAdapter, invoke_adapter
from .analysis import PostAnalysisRecord, post_analysis, rank_by_degree
from .feedback import MIN_AGREEMENT, apply_feedback
from .propaganda import (
    PROPAGANDA_LABELS,
    PatternSet,
    PropagandaLabel,
    PropagandaPattern,
    builtin_patterns,
    classify_propaganda,
)
from .sentiment import (
    SENTIMENT_LABELS,
    Lexicon,
    SentimentLabel,
    builtin_lexicon,
    classify_sentiment,
    label_for_score,
    score_tokens,
)

__all__ = [
    "AdapterRegistry",
    "ClassifierAdapter",
    "Lexicon",
    "MIN_AGREEMENT",
    "PROPAGANDA_LABELS",
    "PatternSet",
    "PostAnalysisRecord",
    "PropagandaLabel",
    "PropagandaPattern",
    "SENTIMENT_LABELS",
    "SentimentLabel",
    "apply_feedback",
    "builtin_lexicon",
    "builtin_patterns",
    "classify_propaganda",
    "classify_sentiment",
    "invoke_adapter",
    "label_for_score",
    "post_analysis",
    "rank_by_degree",
    "score_tokens",
]
