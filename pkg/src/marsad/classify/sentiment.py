"""Lexicon-based sentiment baseline.

Scores are the balance of positive vs negative token hits:
``(p - n) / (p + n)``, zero when nothing matches, so the score is invariant
under duplicating a post's text.  Labels are a pure thresholding of the
score.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from ..ingest.normalize import normalize_text

DEFAULT_THRESHOLD = 0.2
SENTIMENT_LABELS = ("positive", "negative", "neutral")


@dataclass(frozen=True)
class SentimentLabel:
    label: str
    score: float  # in [-1, 1]


@dataclass(frozen=True)
class Lexicon:
    positive: frozenset[str]
    negative: frozenset[str]
    version: int = 1

    def evolve(self, add_positive: Iterable[str] = (), add_negative: Iterable[str] = ()) -> "Lexicon":
        """New version with extra entries; the original is untouched."""
        return Lexicon(
            positive=self.positive | frozenset(add_positive),
            negative=self.negative | frozenset(add_negative),
            version=self.version + 1,
        )

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "positive": sorted(self.positive),
            "negative": sorted(self.negative),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Lexicon":
        return cls(
            positive=frozenset(d["positive"]),
            negative=frozenset(d["negative"]),
            version=int(d.get("version", 1)),
        )


@lru_cache(maxsize=1)
def builtin_lexicon() -> Lexicon:
    """Bundled Arabic+English lexicon, entries normalized on load."""
    positive: set[str] = set()
    negative: set[str] = set()
    for lang in ("ar", "en"):
        raw = resources.files("marsad.data").joinpath(f"sentiment_{lang}.json").read_text("utf-8")
        doc = json.loads(raw)
        positive.update(normalize_text(w) for w in doc["positive"])
        negative.update(normalize_text(w) for w in doc["negative"])
    return Lexicon(positive=frozenset(positive), negative=frozenset(negative), version=1)


def score_tokens(tokens: Sequence[str], lexicon: Lexicon) -> tuple[float, int, int]:
    """Raw score plus hit counts (with multiplicity)."""
    p = sum(1 for t in tokens if t in lexicon.positive)
    n = sum(1 for t in tokens if t in lexicon.negative)
    if p + n == 0:
        return 0.0, 0, 0
    return (p - n) / (p + n), p, n


def label_for_score(score: float, threshold: float = DEFAULT_THRESHOLD) -> str:
    if score > threshold:
        return "positive"
    if score < -threshold:
        return "negative"
    return "neutral"


def classify_sentiment(post, lexicon: Lexicon | None = None, threshold: float = DEFAULT_THRESHOLD) -> SentimentLabel:
    """Classify one tokenized post (anything with a ``tokens`` attribute)."""
    lex = lexicon or builtin_lexicon()
    score, _, _ = score_tokens(post.tokens, lex)
    return SentimentLabel(label=label_for_score(score, threshold), score=score)
