"""Temporal trend detection and spatial aggregation."""

from .spatial import (
    GEOTAG_MAX_KM,
    OTHER_REGION,
    Gazetteer,
    LocationMention,
    RegionCount,
    aggregate_regions,
    extract_locations,
    haversine_km,
)
from .timeline import (
    GRANULARITIES,
    Bucket,
    Spike,
    TimeSeries,
    bucket_terms,
    bucket_timeline,
    detect_spikes,
    floor_bucket,
)

__all__ = [
    "GEOTAG_MAX_KM",
    "GRANULARITIES",
    "OTHER_REGION",
    "Bucket",
    "Gazetteer",
    "LocationMention",
    "RegionCount",
    "Spike",
    "TimeSeries",
    "aggregate_regions",
    "bucket_terms",
    "bucket_timeline",
    "detect_spikes",
    "extract_locations",
    "floor_bucket",
    "haversine_km",
]
