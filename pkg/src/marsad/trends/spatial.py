"""Location extraction and regional aggregation.

Two sources: geotags are resolved to the nearest gazetteer region within
100 km (haversine); text is scanned for exact normalized gazetteer-name
matches.  The bundled gazetteer covers MENA-region cities and countries
with Arabic and English aliases; callers may load their own.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..ingest import Post
from ..ingest.normalize import normalize_text

GEOTAG_MAX_KM = 100.0
OTHER_REGION = "other"

EARTH_RADIUS_KM = 6371.0088


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance between two points in kilometres."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


@dataclass(frozen=True)
class LocationMention:
    mention: str  # matched alias text, or the region name for geotags
    region: str
    source: str  # "geotag" | "text"


@dataclass(frozen=True)
class RegionCount:
    post_count: int
    lat: float
    lon: float


class Gazetteer:
    """Alias table: region name + per-language aliases + centroid."""

    def __init__(self, rows: list[tuple[str, str, str, float, float]]):
        # rows: (region, lang, alias, lat, lon); aliases normalized here
        self.coords: dict[str, tuple[float, float]] = {}
        self._aliases: list[tuple[str, str, re.Pattern]] = []
        seen: set[tuple[str, str]] = set()
        for region, _lang, alias, lat, lon in rows:
            self.coords.setdefault(region, (lat, lon))
            norm = normalize_text(alias)
            if not norm or (region, norm) in seen:
                continue
            seen.add((region, norm))
            pattern = re.compile(r"(?<!\w)" + re.escape(norm) + r"(?!\w)")
            self._aliases.append((norm, region, pattern))
        self._aliases.sort()

    @classmethod
    def from_csv(cls, text: str) -> "Gazetteer":
        """Parse ``region,lang,alias,lat,lon`` rows (header optional)."""
        rows = []
        for row in csv.reader(io.StringIO(text)):
            if not row or row[0].startswith("#") or row[0] == "region":
                continue
            region, lang, alias, lat, lon = row
            rows.append((region, lang, alias, float(lat), float(lon)))
        return cls(rows)

    @classmethod
    @lru_cache(maxsize=1)
    def builtin(cls) -> "Gazetteer":
        text = resources.files("marsad.data").joinpath("gazetteer.csv").read_text("utf-8")
        return cls.from_csv(text)

    def nearest_region(self, lat: float, lon: float, max_km: float = GEOTAG_MAX_KM) -> str:
        """Nearest region within ``max_km``; exact distance ties resolve to
        the lexicographically smaller region name."""
        best: tuple[float, str] | None = None
        for region, (rlat, rlon) in self.coords.items():
            cand = (haversine_km(lat, lon, rlat, rlon), region)
            if best is None or cand < best:
                best = cand
        if best is None or best[0] > max_km:
            return OTHER_REGION
        return best[1]

    def find_in_text(self, norm_text: str) -> list[tuple[int, str, str]]:
        """All alias matches as (position, matched_alias, region)."""
        hits = []
        for norm, region, pattern in self._aliases:
            m = pattern.search(norm_text)
            if m:
                hits.append((m.start(), norm, region))
        hits.sort()
        return hits


def extract_locations(post: Post, gazetteer: Gazetteer | None = None) -> list[LocationMention]:
    """Locations attached to one post, geotag first then text mentions."""
    gaz = gazetteer or Gazetteer.builtin()
    mentions: list[LocationMention] = []
    if post.geo is not None:
        region = gaz.nearest_region(post.geo.lat, post.geo.lon)
        label = region if region != OTHER_REGION else f"{post.geo.lat:.4f},{post.geo.lon:.4f}"
        mentions.append(LocationMention(mention=label, region=region, source="geotag"))
    for _pos, alias, region in gaz.find_in_text(post.norm_text):
        mentions.append(LocationMention(mention=alias, region=region, source="text"))
    return mentions


def aggregate_regions(
    mentions_per_post: list[list[LocationMention]],
    gazetteer: Gazetteer | None = None,
) -> dict[str, RegionCount]:
    """Post counts per region with centroids.

    A post counts once per distinct region it mentions, however many times
    the region occurs in it; unresolved geotags (region "other") are left
    out of the map.
    """
    gaz = gazetteer or Gazetteer.builtin()
    counts: dict[str, int] = {}
    for mentions in mentions_per_post:
        for region in sorted({m.region for m in mentions if m.region != OTHER_REGION}):
            counts[region] = counts.get(region, 0) + 1
    return {
        region: RegionCount(post_count=c, lat=gaz.coords[region][0], lon=gaz.coords[region][1])
        for region, c in sorted(counts.items())
    }
