"""Classifier adapters: the seam between the engine and its models.

The built-in baselines run in-process; external adapters speak a small
HTTP contract (POST a JSON batch, get labels back) so hosted models can be
plugged in without touching the engine.  Batch order is always preserved
and per-item failures surface as error markers, never silent drops.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import httpx

from ..errors import AdapterError
from ..ingest import Post
from .propaganda import PROPAGANDA_LABELS, PatternSet, classify_propaganda
from .sentiment import SENTIMENT_LABELS, Lexicon, classify_sentiment


@dataclass(frozen=True)
class ClassifierAdapter:
    adapter_id: str
    kind: str  # "sentiment" | "propaganda"
    mode: str = "baseline"  # "baseline" | "http"
    url: str | None = None
    token: str | None = None
    label_set: tuple[str, ...] = ()

    def describe(self) -> dict:
        # token deliberately omitted: descriptors are safe to log/serve
        return {
            "adapter_id": self.adapter_id,
            "kind": self.kind,
            "mode": self.mode,
            "url": self.url,
            "label_set": list(self.label_set),
        }


class AdapterRegistry:
    """Holds registered adapters; exactly one default per kind."""

    def __init__(self):
        self._adapters: dict[str, ClassifierAdapter] = {}
        self._defaults: dict[str, str] = {}
        self.register(
            ClassifierAdapter("baseline-sentiment", "sentiment", label_set=SENTIMENT_LABELS),
            default=True,
        )
        self.register(
            ClassifierAdapter("baseline-propaganda", "propaganda", label_set=PROPAGANDA_LABELS),
            default=True,
        )

    def register(self, adapter: ClassifierAdapter, default: bool = False) -> None:
        self._adapters[adapter.adapter_id] = adapter
        if default or adapter.kind not in self._defaults:
            self._defaults[adapter.kind] = adapter.adapter_id

    def get(self, adapter_id: str) -> ClassifierAdapter:
        if adapter_id not in self._adapters:
            raise AdapterError("ADAPTER_UNREACHABLE", f"unknown adapter {adapter_id!r}")
        return self._adapters[adapter_id]

    def default_for(self, kind: str) -> ClassifierAdapter:
        return self._adapters[self._defaults[kind]]

    def list(self) -> list[ClassifierAdapter]:
        return [self._adapters[k] for k in sorted(self._adapters)]


def invoke_adapter(
    adapter: ClassifierAdapter,
    posts: Sequence[Post],
    *,
    lexicon: Lexicon | None = None,
    patterns: PatternSet | None = None,
    sentiment_threshold: float = 0.2,
    propaganda_threshold: float = 0.5,
    timeout: float = 30.0,
    batch_size: int = 64,
    max_in_flight: int = 2,
    client: httpx.Client | None = None,
) -> list[dict]:
    """Label a batch of posts through the given adapter.

    Returns one dict per post, in input order: ``{"id", "label", "score"}``
    on success or ``{"id", "error"}`` for a per-item failure.  External
    adapters are called in chunks of ``batch_size`` with at most
    ``max_in_flight`` requests in the air at once.
    """
    if adapter.mode == "baseline":
        out = []
        for p in posts:
            if adapter.kind == "sentiment":
                s = classify_sentiment(p, lexicon, threshold=sentiment_threshold)
                out.append({"id": p.id, "label": s.label, "score": s.score})
            else:
                pr = classify_propaganda(p, patterns, threshold=propaganda_threshold)
                out.append(
                    {
                        "id": p.id,
                        "label": "propaganda" if pr.flag else "clean",
                        "score": pr.score,
                        "spans": [list(s) for s in pr.spans],
                        "technique": pr.technique,
                    }
                )
        return out

    chunks = [posts[i : i + batch_size] for i in range(0, len(posts), batch_size)]
    own_client = client is None
    http = client or httpx.Client(timeout=timeout)
    try:
        if len(chunks) <= 1 or max_in_flight <= 1:
            results = [_call_http_adapter(adapter, chunk, http) for chunk in chunks]
        else:
            with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
                results = list(pool.map(lambda c: _call_http_adapter(adapter, c, http), chunks))
    finally:
        if own_client:
            http.close()
    return [item for chunk in results for item in chunk]


def _call_http_adapter(
    adapter: ClassifierAdapter, posts: Sequence[Post], http: httpx.Client
) -> list[dict]:
    payload = {"kind": adapter.kind, "items": [{"id": p.id, "text": p.norm_text} for p in posts]}
    headers = {}
    if adapter.token:
        headers["Authorization"] = f"Bearer {adapter.token}"
    try:
        resp = http.post(adapter.url, json=payload, headers=headers)
    except httpx.HTTPError as exc:
        raise AdapterError(
            "ADAPTER_UNREACHABLE", f"adapter {adapter.adapter_id}: {type(exc).__name__}"
        ) from exc
    if resp.status_code != 200:
        raise AdapterError(
            "BAD_ADAPTER_RESPONSE", f"adapter {adapter.adapter_id}: HTTP {resp.status_code}"
        )
    try:
        body = resp.json()
    except ValueError as exc:
        raise AdapterError("BAD_ADAPTER_RESPONSE", "response is not JSON") from exc

    labels = body.get("labels") if isinstance(body, dict) else None
    if not isinstance(labels, list) or len(labels) != len(posts):
        got = len(labels) if isinstance(labels, list) else "none"
        raise AdapterError(
            "BAD_ADAPTER_RESPONSE", f"expected {len(posts)} labels, got {got}"
        )
    by_id: dict[str, dict] = {}
    for item in labels:
        if not isinstance(item, dict) or "id" not in item:
            raise AdapterError("BAD_ADAPTER_RESPONSE", "label item without id")
        by_id[str(item["id"])] = item
    out = []
    for p in posts:
        item = by_id.get(p.id)
        if item is None:
            raise AdapterError("BAD_ADAPTER_RESPONSE", f"no label for post {p.id!r}")
        if "error" in item:
            out.append({"id": p.id, "error": str(item["error"])})
        else:
            out.append({"id": p.id, "label": item.get("label"), "score": item.get("score")})
    return out
