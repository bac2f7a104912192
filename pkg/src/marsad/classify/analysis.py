"""Per-post analysis records: label + degree + location mentions.

Degree is the strength of the assigned label on [0, 1] (absolute sentiment
score, or the propaganda score), giving a total order for ranking posts by
impact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..ingest import Post
from ..trends.spatial import LocationMention
from .propaganda import PropagandaLabel
from .sentiment import SentimentLabel


@dataclass(frozen=True)
class PostAnalysisRecord:
    post_id: str
    kind: str
    label: str
    degree: float  # in [0, 1]
    locations: list[str]  # distinct region names, sorted


def post_analysis(
    post: Post,
    sentiment: SentimentLabel,
    propaganda: PropagandaLabel,
    locations: Sequence[LocationMention],
) -> list[PostAnalysisRecord]:
    """One record per analysis kind for this post."""
    regions = sorted({m.region for m in locations})
    return [
        PostAnalysisRecord(
            post_id=post.id,
            kind="sentiment",
            label=sentiment.label,
            degree=abs(sentiment.score),
            locations=regions,
        ),
        PostAnalysisRecord(
            post_id=post.id,
            kind="propaganda",
            label="propaganda" if propaganda.flag else "clean",
            degree=propaganda.score,
            locations=regions,
        ),
    ]


def rank_by_degree(records: Sequence[PostAnalysisRecord]) -> list[PostAnalysisRecord]:
    """Stable total order: degree descending, then post id, then kind."""
    return sorted(records, key=lambda r: (-r.degree, r.post_id, r.kind))
