from collections import Counter
from datetime import datetime, timezone

import pytest

from conftest import make_post
from marsad.errors import AnalysisError
from marsad.trends import (
    Gazetteer,
    TimeSeries,
    Bucket,
    aggregate_regions,
    bucket_terms,
    bucket_timeline,
    detect_spikes,
    extract_locations,
    haversine_km,
)
from oracles import rolling_z_scores


def series_from_counts(counts, granularity="day"):
    base = datetime(2024, 6, 1, tzinfo=timezone.utc)
    from datetime import timedelta

    return TimeSeries(
        granularity=granularity,
        buckets=[
            Bucket(start=base + timedelta(days=i), post_count=c, engagement=0)
            for i, c in enumerate(counts)
        ],
    )


class TestBucketTimeline:
    def test_single_post_single_bucket(self):
        series = bucket_timeline([make_post("1", "hi", ts="2024-06-03T14:22:00+00:00")], "day")
        assert len(series.buckets) == 1
        assert series.buckets[0].post_count == 1
        assert series.buckets[0].start == datetime(2024, 6, 3, tzinfo=timezone.utc)

    def test_same_day_posts_share_bucket(self):
        posts = [
            make_post("1", "a post", ts="2024-06-03T01:00:00+00:00"),
            make_post("2", "b post", ts="2024-06-03T23:59:59+00:00"),
        ]
        series = bucket_timeline(posts, "day")
        assert len(series.buckets) == 1 and series.buckets[0].post_count == 2

    def test_gaps_emitted_with_zero_counts(self):
        posts = [
            make_post("1", "first", ts="2024-06-01T00:00:00+00:00"),
            make_post("2", "last", ts="2024-06-04T00:00:00+00:00"),
        ]
        series = bucket_timeline(posts, "day")
        assert [b.post_count for b in series.buckets] == [1, 0, 0, 1]

    def test_seven_day_fixture_hand_counts(self):
        plan = {1: 3, 2: 1, 3: 0, 4: 5, 5: 2, 6: 0, 7: 4}
        posts = []
        n = 0
        for day, count in plan.items():
            for _ in range(count):
                n += 1
                posts.append(make_post(str(n), f"post {n}", ts=f"2024-06-{day:02d}T10:00:00+00:00"))
        series = bucket_timeline(posts, "day")
        assert [b.post_count for b in series.buckets] == [3, 1, 0, 5, 2, 0, 4]

    def test_conservation_over_granularities(self):
        posts = [
            make_post(str(i), f"post {i}", ts=f"2024-06-{(i % 9) + 1:02d}T{i % 24:02d}:00:00+00:00")
            for i in range(40)
        ]
        for g in ("hour", "day", "week"):
            series = bucket_timeline(posts, g)
            assert sum(b.post_count for b in series.buckets) == 40

    def test_engagement_sums_likes_and_shares(self):
        posts = [
            make_post("1", "a", ts="2024-06-01T00:00:00+00:00", likes=3, shares=2),
            make_post("2", "b", ts="2024-06-01T01:00:00+00:00", likes=1, shares=0),
        ]
        series = bucket_timeline(posts, "day")
        assert series.buckets[0].engagement == 6

    def test_week_buckets_start_monday(self):
        series = bucket_timeline([make_post("1", "hi", ts="2024-06-05T00:00:00+00:00")], "week")
        assert series.buckets[0].start.weekday() == 0  # 2024-06-03


class TestDetectSpikes:
    def test_constant_series_no_spikes(self):
        assert detect_spikes(series_from_counts([5] * 10), window=7) == []

    def test_forced_final_spike(self):
        spikes = detect_spikes(series_from_counts([1, 1, 1, 1, 1, 1, 1, 100]), window=7)
        assert len(spikes) == 1
        assert spikes[0].bucket_start == series_from_counts([0] * 8).buckets[7].start
        assert spikes[0].z_score >= 2.0

    def test_z_matches_independent_rolling_oracle(self):
        counts = [4, 6, 5, 7, 4, 6, 5, 30, 5, 4]
        series = series_from_counts(counts)
        spikes = detect_spikes(series, window=7, z_threshold=2.0)
        oracle = rolling_z_scores([float(c) for c in counts], 7)
        expected = [i for i, z in enumerate(oracle) if z is not None and z >= 2.0]
        got = [series.buckets.index(next(b for b in series.buckets if b.start == s.bucket_start)) for s in spikes]
        assert got == expected
        for s, i in zip(spikes, got):
            assert abs(s.z_score - oracle[i]) < 1e-12

    def test_planted_5_sigma_bucket_flagged_exactly(self):
        base = [10, 12, 11, 9, 10, 11, 12, 10, 11, 9, 10, 12]
        counts = base + [60] + base
        series = series_from_counts(counts)
        spikes = detect_spikes(series, window=7, z_threshold=2.0)
        assert len(spikes) == 1
        assert spikes[0].bucket_start == series.buckets[len(base)].start

    def test_series_too_short(self):
        with pytest.raises(AnalysisError) as ei:
            detect_spikes(series_from_counts([1] * 7), window=7)
        assert ei.value.code == "SERIES_TOO_SHORT"

    def test_top_terms_attached(self):
        posts = []
        n = 0
        for day in range(1, 8):
            n += 1
            posts.append(make_post(str(n), "calm words", ts=f"2024-06-{day:02d}T10:00:00+00:00"))
        for _ in range(30):
            n += 1
            posts.append(make_post(str(n), "storm flood alert", ts="2024-06-08T10:00:00+00:00"))
        series = bucket_timeline(posts, "day")
        spikes = detect_spikes(series, window=7, terms_by_bucket=bucket_terms(posts, "day"))
        assert spikes and spikes[0].top_terms[:3] == ["alert", "flood", "storm"]


class TestLocations:
    def test_geotag_at_exact_city_coordinates(self):
        post = make_post("1", "no names here", geo=(25.2854, 51.5310))
        mentions = extract_locations(post)
        assert [(m.region, m.source) for m in mentions] == [("Doha", "geotag")]

    def test_text_mention_english(self):
        post = make_post("1", "I love Doha")
        assert [(m.region, m.source) for m in extract_locations(post)] == [("Doha", "text")]

    def test_text_mention_arabic_alias(self):
        post = make_post("1", "الدوحة جميلة")
        mentions = extract_locations(post)
        assert ("Doha", "text") in [(m.region, m.source) for m in mentions]

    def test_far_geotag_resolves_to_other(self):
        post = make_post("1", "somewhere remote", geo=(-45.0, -170.0))
        mentions = extract_locations(post)
        assert mentions[0].region == "other"

    def test_tie_resolves_to_lexicographically_smaller_region(self):
        gaz = Gazetteer([
            ("Bravo", "en", "bravo", 10.0, 10.0),
            ("Alpha", "en", "alpha", 10.0, 10.0),
        ])
        assert gaz.nearest_region(10.2, 10.2) == "Alpha"

    def test_haversine_known_distance(self):
        # Doha to Dubai is roughly 379 km
        d = haversine_km(25.2854, 51.5310, 25.2048, 55.2708)
        assert 370 < d < 390

    def test_word_boundary_no_partial_match(self):
        post = make_post("1", "radohaq is not a city")
        assert extract_locations(post) == []


class TestAggregateRegions:
    def test_no_locations_empty_map(self):
        assert aggregate_regions([[]]) == {}

    def test_duplicate_mentions_count_once_per_post(self):
        post = make_post("1", "Doha Doha doha")
        counts = aggregate_regions([extract_locations(post)])
        assert counts["Doha"].post_count == 1

    def test_hand_counted_fixture(self):
        posts = (
            [make_post(f"d{i}", "hello Doha") for i in range(7)]
            + [make_post(f"c{i}", "hello Cairo") for i in range(5)]
            + [make_post(f"x{i}", "no city") for i in range(8)]
        )
        counts = aggregate_regions([extract_locations(p) for p in posts])
        assert counts["Doha"].post_count == 7
        assert counts["Cairo"].post_count == 5
        assert set(counts) == {"Doha", "Cairo"}

    def test_centroids_attached(self):
        counts = aggregate_regions([extract_locations(make_post("1", "visit Doha"))])
        assert abs(counts["Doha"].lat - 25.2854) < 1e-9
