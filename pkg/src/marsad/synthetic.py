"""Seeded synthetic corpora for tests, demos and benchmarks.

``planted_corpus`` builds token lists with disjoint planted topics (the
recoverability fixture for the subtopic pipeline); ``synthetic_posts``
builds full post records with authors, reply structure, mentions, geotags,
sentiment words and a traffic spike, for end-to-end runs.
"""

from __future__ import annotations

import random

TOPIC_KEYWORDS: dict[str, list[str]] = {
    "economy": [
        "inflation", "budget", "market", "investment", "banking",
        "currency", "exports", "tariffs", "stocks", "revenue",
    ],
    "football": [
        "football", "stadium", "goalkeeper", "midfielder", "championship",
        "referee", "penalty", "transfer", "coach", "striker",
    ],
    "weather": [
        "rainfall", "humidity", "sandstorm", "forecast", "temperature",
        "heatwave", "thunderstorm", "monsoon", "drought", "windy",
    ],
}

# Cross-topic filler; low TF-IDF weight by design (spread over all topics).
SHARED_POOL = ["update", "report", "video", "photo", "live", "thread", "link", "story"]

_POSITIVE_WORDS = ["amazing", "wonderful", "excellent", "fantastic", "great"]
_NEGATIVE_WORDS = ["terrible", "awful", "horrible", "disaster", "worst"]
_CITIES = ["Doha", "Dubai", "Cairo", "Riyadh", "Beirut", "Amman"]
_ARABIC_SNIPPETS = [
    "الطقس اليوم جميل في الدوحة",
    "مباراة رائعة في الدوري",
    "اسعار السوق في ارتفاع كبير",
    "امطار غزيرة متوقعة غدا",
    "فريقنا حقق فوز عظيم",
]


def planted_corpus(
    n_posts: int = 200,
    seed: int = 0,
    words_per_post: tuple[int, int] = (8, 15),
    noise_ratio: float = 0.08,
) -> tuple[list[list[str]], list[int]]:
    """Token lists with one planted topic per document.

    Returns (corpus, labels) where ``labels[i]`` indexes the topic of
    document ``i`` in ``TOPIC_KEYWORDS`` order.  Deterministic in ``seed``.
    """
    rng = random.Random(seed)
    topics = list(TOPIC_KEYWORDS.values())
    corpus: list[list[str]] = []
    labels: list[int] = []
    for i in range(n_posts):
        topic_id = i % len(topics)
        n_words = rng.randint(*words_per_post)
        tokens = []
        for _ in range(n_words):
            if rng.random() < noise_ratio:
                tokens.append(rng.choice(SHARED_POOL))
            else:
                tokens.append(rng.choice(topics[topic_id]))
        corpus.append(tokens)
        labels.append(topic_id)
    return corpus, labels


def synthetic_posts(n_posts: int = 200, seed: int = 0) -> list[dict]:
    """Full schema-compatible post records for end-to-end runs.

    Timeline spans 14 days with a planted burst on day 10; authors form a
    hub-and-spoke interaction pattern so the network analysis has signal.
    """
    rng = random.Random(seed)
    corpus, labels = planted_corpus(n_posts, seed=seed)
    authors = [f"u{i:02d}" for i in range(1, 17)]
    hub = authors[0]
    city_coords = {
        "Doha": (25.2854, 51.5310),
        "Dubai": (25.2048, 55.2708),
        "Cairo": (30.0444, 31.2357),
        "Riyadh": (24.7136, 46.6753),
        "Beirut": (33.8938, 35.5018),
        "Amman": (31.9454, 35.9284),
    }

    records: list[dict] = []
    for i, tokens in enumerate(corpus):
        # day 10 carries a burst of roughly triple density
        if rng.random() < 0.25:
            day = 10
        else:
            day = rng.randint(1, 14)
        hour = rng.randint(0, 23)
        minute = rng.randint(0, 59)
        text_words = list(tokens)
        if rng.random() < 0.15:
            text_words.append(rng.choice(_POSITIVE_WORDS))
        elif rng.random() < 0.15:
            text_words.append(rng.choice(_NEGATIVE_WORDS))
        city = None
        if rng.random() < 0.2:
            city = rng.choice(_CITIES)
            text_words.extend(["in", city])
        text = " ".join(text_words)
        if rng.random() < 0.08:
            text = rng.choice(_ARABIC_SNIPPETS)

        author = hub if rng.random() < 0.12 else rng.choice(authors)
        rec: dict = {
            "id": f"p{i + 1:04d}",
            "text": text,
            "timestamp": f"2024-06-{day:02d}T{hour:02d}:{minute:02d}:00Z",
            "author": author,
            "likes": rng.randint(0, 50) * (3 if day == 10 else 1),
            "shares": rng.randint(0, 12),
        }
        if i > 0 and rng.random() < 0.3:
            rec["parent_id"] = f"p{rng.randint(1, i):04d}"
        if rng.random() < 0.25:
            target = hub if rng.random() < 0.5 else rng.choice(authors)
            if target != author:
                rec["mentions"] = [target]
        if city is not None and rng.random() < 0.8:
            lat, lon = city_coords[city]
            rec["lat"] = round(lat + rng.uniform(-0.05, 0.05), 4)
            rec["lon"] = round(lon + rng.uniform(-0.05, 0.05), 4)
        records.append(rec)
    return records
