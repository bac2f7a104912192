"""Temporal bucketing and spike detection over post timelines."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

from ..errors import AnalysisError
from ..ingest import Post

GRANULARITIES = ("hour", "day", "week")


@dataclass(frozen=True)
class Bucket:
    start: datetime
    post_count: int
    engagement: int  # sum of likes + shares


@dataclass
class TimeSeries:
    granularity: str
    buckets: list[Bucket]


@dataclass(frozen=True)
class Spike:
    bucket_start: datetime
    z_score: float
    top_terms: list[str]


def floor_bucket(dt: datetime, granularity: str) -> datetime:
    """Floor a UTC instant to its bucket start (ISO weeks start Monday)."""
    dt = dt.astimezone(timezone.utc)
    if granularity == "hour":
        return dt.replace(minute=0, second=0, microsecond=0)
    if granularity == "day":
        return dt.replace(hour=0, minute=0, second=0, microsecond=0)
    if granularity == "week":
        day = dt.replace(hour=0, minute=0, second=0, microsecond=0)
        return day - timedelta(days=day.weekday())
    raise ValueError(f"unknown granularity {granularity!r}")


def _step(granularity: str) -> timedelta:
    return {"hour": timedelta(hours=1), "day": timedelta(days=1), "week": timedelta(weeks=1)}[granularity]


def bucket_timeline(posts: list[Post], granularity: str = "day") -> TimeSeries:
    """Count posts and engagement per UTC bucket.

    Buckets are contiguous from the earliest to the latest post; gaps are
    emitted with zero counts so downstream windows see a regular series.
    """
    if granularity not in GRANULARITIES:
        raise ValueError(f"unknown granularity {granularity!r}")
    if not posts:
        return TimeSeries(granularity=granularity, buckets=[])
    counts: dict[datetime, int] = {}
    engagement: dict[datetime, int] = {}
    for p in posts:
        b = floor_bucket(p.timestamp, granularity)
        counts[b] = counts.get(b, 0) + 1
        engagement[b] = engagement.get(b, 0) + p.likes + p.shares
    step = _step(granularity)
    buckets = []
    current, last = min(counts), max(counts)
    while current <= last:
        buckets.append(
            Bucket(start=current, post_count=counts.get(current, 0), engagement=engagement.get(current, 0))
        )
        current += step
    return TimeSeries(granularity=granularity, buckets=buckets)


def bucket_terms(posts: list[Post], granularity: str = "day") -> dict[datetime, Counter]:
    """Token counts per bucket, for labelling spikes with their top terms."""
    terms: dict[datetime, Counter] = {}
    for p in posts:
        b = floor_bucket(p.timestamp, granularity)
        terms.setdefault(b, Counter()).update(p.tokens)
    return terms


def detect_spikes(
    series: TimeSeries,
    window: int = 7,
    z_threshold: float = 2.0,
    terms_by_bucket: dict[datetime, Counter] | None = None,
) -> list[Spike]:
    """Flag buckets whose count is a z-score outlier.

    The statistic for bucket ``i`` uses the trailing window of ``window``
    buckets ending at ``i`` (inclusive): ``z = (x - mean) / std`` with the
    population std; a zero std defines ``z = 0``.  Buckets with
    ``z >= z_threshold`` are reported with their top-5 terms.
    """
    n = len(series.buckets)
    if n < window + 1:
        raise AnalysisError("SERIES_TOO_SHORT", f"need at least {window + 1} buckets, got {n}")
    values = np.array([b.post_count for b in series.buckets], dtype=np.float64)
    spikes = []
    for i in range(window - 1, n):
        win = values[i - window + 1 : i + 1]
        std = float(win.std())
        z = 0.0 if std == 0.0 else (values[i] - float(win.mean())) / std
        if z >= z_threshold:
            start = series.buckets[i].start
            top: list[str] = []
            if terms_by_bucket and start in terms_by_bucket:
                counter = terms_by_bucket[start]
                top = [t for t, _ in sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:5]]
            spikes.append(Spike(bucket_start=start, z_score=float(z), top_terms=top))
    return spikes
