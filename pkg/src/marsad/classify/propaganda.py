"""Span-matching propaganda baseline.

Flags text by matching a weighted set of persuasion-technique indicator
phrases against the normalized text.  Overlapping matches are resolved by
keeping the longest; the score is the (capped) sum of kept pattern weights.
Spans are byte offsets into the UTF-8 encoding of ``norm_text`` so they
survive transport to non-Python consumers.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..ingest.normalize import normalize_text

DEFAULT_THRESHOLD = 0.5
PROPAGANDA_LABELS = ("propaganda", "clean")


@dataclass(frozen=True)
class PropagandaPattern:
    pattern: str  # normalized phrase
    technique: str
    weight: float


@dataclass(frozen=True)
class PropagandaLabel:
    flag: bool
    score: float  # in [0, 1]
    spans: list[tuple[int, int]]  # byte offsets into norm_text, non-overlapping
    technique: str | None


class PatternSet:
    def __init__(self, patterns: list[PropagandaPattern], version: int = 1):
        self.patterns = patterns
        self.version = version
        self._compiled = [
            (p, re.compile(r"(?<!\w)" + re.escape(p.pattern) + r"(?!\w)")) for p in patterns
        ]

    def __len__(self) -> int:
        return len(self.patterns)


@lru_cache(maxsize=1)
def builtin_patterns() -> PatternSet:
    raw = resources.files("marsad.data").joinpath("propaganda_patterns.json").read_text("utf-8")
    doc = json.loads(raw)
    patterns = [
        PropagandaPattern(
            pattern=normalize_text(item["pattern"]),
            technique=item["technique"],
            weight=float(item["weight"]),
        )
        for item in doc["patterns"]
    ]
    return PatternSet(patterns, version=int(doc.get("version", 1)))


def _byte_offsets(text: str) -> list[int]:
    """Cumulative UTF-8 byte length before each char position (plus end)."""
    offsets = [0]
    total = 0
    for ch in text:
        total += len(ch.encode("utf-8"))
        offsets.append(total)
    return offsets


def classify_propaganda(post, patterns: PatternSet | None = None, threshold: float = DEFAULT_THRESHOLD) -> PropagandaLabel:
    """Classify one post (anything with a ``norm_text`` attribute)."""
    pset = patterns or builtin_patterns()
    text = post.norm_text
    candidates: list[tuple[int, int, float, str, str]] = []
    for pat, rx in pset._compiled:
        for m in rx.finditer(text):
            candidates.append((m.start(), m.end(), pat.weight, pat.technique, pat.pattern))

    # Longest match wins; ties by weight, then earliest. Kept spans never overlap.
    candidates.sort(key=lambda c: (-(c[1] - c[0]), -c[2], c[0], c[4]))
    kept: list[tuple[int, int, float, str, str]] = []
    for cand in candidates:
        if all(cand[1] <= k[0] or cand[0] >= k[1] for k in kept):
            kept.append(cand)
    kept.sort(key=lambda c: c[0])

    score = min(1.0, sum(c[2] for c in kept))
    technique = None
    if kept:
        best = max(kept, key=lambda c: (c[2], -c[0]))
        technique = best[3]
    offsets = _byte_offsets(text)
    spans = [(offsets[c[0]], offsets[c[1]]) for c in kept]
    return PropagandaLabel(flag=score >= threshold, score=score, spans=spans, technique=technique)
