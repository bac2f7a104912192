"""Domain types for dataset ingestion: raw records, post schema, posts,
validation reports and dataset metadata."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

# Every field a Post can carry; schemas must stay within this set.
KNOWN_FIELDS = frozenset(
    {"id", "text", "timestamp", "author", "lat", "lon", "parent_id", "mentions", "likes", "shares", "lang"}
)

DEFAULT_REQUIRED = frozenset({"id", "text", "timestamp"})
DEFAULT_OPTIONAL = frozenset({"author", "lat", "lon", "parent_id", "mentions", "likes", "shares", "lang"})

DEFAULT_TYPE_MAP = {
    "id": "string",
    "text": "string",
    "timestamp": "iso8601-timestamp",
    "author": "string",
    "lat": "float",
    "lon": "float",
    "parent_id": "string",
    "mentions": "string",
    "likes": "integer",
    "shares": "integer",
    "lang": "string",
}

VALID_TYPES = frozenset({"string", "integer", "float", "iso8601-timestamp"})


@dataclass(frozen=True)
class RawRecord:
    """One pre-validation input row; all field values as strings."""

    row_index: int
    fields: dict[str, str]
    source_format: str


@dataclass
class PostSchema:
    """Declares which fields an upload must/can carry and their types."""

    required: frozenset[str] = DEFAULT_REQUIRED
    optional: frozenset[str] = DEFAULT_OPTIONAL
    type_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_TYPE_MAP))

    def __post_init__(self):
        self.required = frozenset(self.required)
        self.optional = frozenset(self.optional)
        if self.required & self.optional:
            raise ValueError(f"required/optional overlap: {sorted(self.required & self.optional)}")
        unknown = (self.required | self.optional) - KNOWN_FIELDS
        if unknown:
            raise ValueError(f"unknown schema fields: {sorted(unknown)}")
        for f in self.required | self.optional:
            if f not in self.type_map:
                raise ValueError(f"field {f!r} has no type_map entry")
            if self.type_map[f] not in VALID_TYPES:
                raise ValueError(f"field {f!r} has invalid type {self.type_map[f]!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "PostSchema":
        kwargs: dict[str, Any] = {}
        required = frozenset(d["required"]) if "required" in d else DEFAULT_REQUIRED
        kwargs["required"] = required
        if "optional" in d:
            kwargs["optional"] = frozenset(d["optional"])
        else:
            kwargs["optional"] = DEFAULT_OPTIONAL - required
        type_map = dict(DEFAULT_TYPE_MAP)
        type_map.update(d.get("type_map", {}))
        kwargs["type_map"] = type_map
        return cls(**kwargs)


@dataclass(frozen=True)
class Geo:
    lat: float
    lon: float


@dataclass
class Post:
    """One normalized social-media item."""

    id: str
    text: str
    norm_text: str
    tokens: list[str]
    timestamp: datetime  # always UTC-aware
    author: str | None = None
    geo: Geo | None = None
    parent_id: str | None = None
    mentions: list[str] = field(default_factory=list)
    likes: int = 0
    shares: int = 0
    lang: str = "unknown"

    def to_record(self) -> dict:
        """Schema-compatible dict: feeding it back through the parser
        reproduces this post field-for-field."""
        rec: dict[str, Any] = {
            "id": self.id,
            "text": self.text,
            "timestamp": format_timestamp(self.timestamp),
            "likes": self.likes,
            "shares": self.shares,
            "lang": self.lang,
        }
        if self.author is not None:
            rec["author"] = self.author
        if self.geo is not None:
            rec["lat"] = self.geo.lat
            rec["lon"] = self.geo.lon
        if self.parent_id is not None:
            rec["parent_id"] = self.parent_id
        if self.mentions:
            rec["mentions"] = list(self.mentions)
        return rec

    def to_json(self) -> dict:
        """Exact serialization for the document store (includes derived fields)."""
        d = self.to_record()
        d["norm_text"] = self.norm_text
        d["tokens"] = list(self.tokens)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Post":
        geo = None
        if "lat" in d and "lon" in d:
            geo = Geo(lat=float(d["lat"]), lon=float(d["lon"]))
        return cls(
            id=d["id"],
            text=d["text"],
            norm_text=d["norm_text"],
            tokens=list(d["tokens"]),
            timestamp=parse_timestamp(d["timestamp"]),
            author=d.get("author"),
            geo=geo,
            parent_id=d.get("parent_id"),
            mentions=list(d.get("mentions", [])),
            likes=int(d.get("likes", 0)),
            shares=int(d.get("shares", 0)),
            lang=d.get("lang", "unknown"),
        )


@dataclass(frozen=True)
class RowError:
    row_index: int
    error_code: str
    message: str

    def to_dict(self) -> dict:
        return {"row_index": self.row_index, "error_code": self.error_code, "message": self.message}


@dataclass
class ValidationReport:
    accepted: int
    rejected: list[RowError]

    @property
    def total(self) -> int:
        return self.accepted + len(self.rejected)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": [e.to_dict() for e in self.rejected],
            "total": self.total,
        }


@dataclass
class DatasetMetadata:
    n_posts: int
    time_range: tuple[str, str]  # (min, max) as ISO-8601 UTC
    lang_counts: dict[str, int]
    field_fill_rates: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "n_posts": self.n_posts,
            "time_range": list(self.time_range),
            "lang_counts": dict(self.lang_counts),
            "field_fill_rates": dict(self.field_fill_rates),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DatasetMetadata":
        return cls(
            n_posts=d["n_posts"],
            time_range=(d["time_range"][0], d["time_range"][1]),
            lang_counts=dict(d["lang_counts"]),
            field_fill_rates=dict(d["field_fill_rates"]),
        )


_FRACTION_RE = re.compile(r"\.(\d+)")


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp to a UTC-aware datetime.

    Accepts a trailing ``Z``, explicit offsets, naive values (assumed UTC)
    and any fractional-second precision.  Raises ValueError otherwise.
    """
    s = value.strip()
    if not s:
        raise ValueError("empty timestamp")
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    m = _FRACTION_RE.search(s)
    if m:  # datetime.fromisoformat (3.10) only takes 3/6-digit fractions
        frac = m.group(1)[:6].ljust(6, "0")
        s = s[: m.start()] + "." + frac + s[m.end() :]
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")
