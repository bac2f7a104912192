import sys
from datetime import datetime, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from marsad.config import Config
from marsad.engine import Engine
from marsad.ingest import Geo, Post, normalize_text, tokenize
from marsad.store import Storage


def make_post(
    post_id: str,
    text: str,
    ts: str = "2024-06-01T12:00:00+00:00",
    author: str | None = None,
    geo: tuple[float, float] | None = None,
    parent_id: str | None = None,
    mentions: list[str] | None = None,
    likes: int = 0,
    shares: int = 0,
    lang: str = "en",
    stopwords: frozenset = frozenset(),
) -> Post:
    norm = normalize_text(text)
    return Post(
        id=post_id,
        text=text,
        norm_text=norm,
        tokens=tokenize(norm, stopwords),
        timestamp=datetime.fromisoformat(ts).astimezone(timezone.utc),
        author=author,
        geo=Geo(*geo) if geo else None,
        parent_id=parent_id,
        mentions=mentions or [],
        likes=likes,
        shares=shares,
        lang=lang,
    )


@pytest.fixture
def storage(tmp_path):
    s = Storage(tmp_path / "data")
    yield s
    s.close()


@pytest.fixture
def engine(tmp_path):
    cfg = Config(data_dir=tmp_path / "data", tokens={"tester": "test-token"})
    return Engine(cfg)
