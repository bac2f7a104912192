"""Pluggable online data sources.

Two modes: *free* sources take no credentials (and refuse them — they must
never transmit secrets), *credentialed* sources require them and pass them
through to the platform.  Every source returns plain :class:`RawRecord`
rows that flow through the normal upload validation path, and searching
never touches local state until the caller saves the results as a dataset.

Credentials are scrub-safe by construction: they are never logged, never
echoed in errors and never stored in returned records.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

import httpx

from .errors import ConnectorError
from .ingest import RawRecord

log = logging.getLogger("marsad.connectors")

FREE = "free"
CREDENTIALED = "credentialed"


@dataclass(frozen=True)
class SourceDescriptor:
    source_id: str
    name: str
    mode: str  # "free" | "credentialed"
    param_schema: dict = field(default_factory=dict)
    credential_schema: dict | None = None

    def __post_init__(self):
        if self.mode not in (FREE, CREDENTIALED):
            raise ValueError(f"invalid mode {self.mode!r}")
        if self.mode == FREE and self.credential_schema is not None:
            raise ValueError("free sources must not declare credentials")
        if self.mode == CREDENTIALED and not self.credential_schema:
            raise ValueError("credentialed sources must declare a credential schema")

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "name": self.name,
            "mode": self.mode,
            "param_schema": self.param_schema,
            "credential_schema": self.credential_schema,
        }


_QUERY_PARAMS = {
    "query": {"type": "string", "required": True},
    "limit": {"type": "integer", "required": False, "default": 50},
}


class Source:
    """Base source; subclasses implement ``_fetch``."""

    descriptor: SourceDescriptor

    def search(
        self,
        query: str,
        limit: int = 50,
        credentials: Mapping[str, str] | None = None,
    ) -> list[RawRecord]:
        if self.descriptor.mode == FREE and credentials:
            raise ConnectorError(
                "CREDENTIALS_NOT_SUPPORTED",
                f"source {self.descriptor.source_id!r} is keyless and rejects credentials",
            )
        if self.descriptor.mode == CREDENTIALED:
            missing = [
                k
                for k, spec in (self.descriptor.credential_schema or {}).items()
                if spec.get("required", True) and not (credentials or {}).get(k)
            ]
            if missing:
                raise ConnectorError(
                    "CREDENTIALS_REQUIRED",
                    f"source {self.descriptor.source_id!r} requires: {', '.join(missing)}",
                )
        if limit < 1:
            return []
        records = self._fetch(query, limit, credentials or {})
        return records[:limit]

    def _fetch(self, query: str, limit: int, credentials: Mapping[str, str]) -> list[RawRecord]:
        raise NotImplementedError


class MockLocalSource(Source):
    """Keyless source backed by a bundled fixture corpus (for demos/tests)."""

    def __init__(self):
        self.descriptor = SourceDescriptor(
            source_id="mock_local",
            name="Local fixture corpus",
            mode=FREE,
            param_schema=dict(_QUERY_PARAMS),
        )

    def _fetch(self, query: str, limit: int, credentials) -> list[RawRecord]:
        raw = resources.files("marsad.data").joinpath("mock_posts.jsonl").read_text("utf-8")
        needle = query.strip().lower()
        records = []
        for i, line in enumerate(l for l in raw.splitlines() if l.strip()):
            obj = json.loads(line)
            if needle and needle not in obj.get("text", "").lower():
                continue
            records.append(
                RawRecord(
                    row_index=len(records) + 1,
                    fields={k: str(v) for k, v in obj.items()},
                    source_format="json",
                )
            )
        return records


class GenericHttpSource(Source):
    """Keyless HTTP source: URL template + field mapping onto the schema.

    The template may contain ``{query}`` and ``{limit}`` placeholders; the
    response must be a JSON array of objects.  ``field_mapping`` renames
    response keys onto post-schema fields, e.g. ``{"id": "uid", "text":
    "body", "timestamp": "created"}``.
    """

    def __init__(
        self,
        url_template: str = "http://127.0.0.1:9/search?q={query}&n={limit}",
        field_mapping: Mapping[str, str] | None = None,
        timeout: float = 10.0,
    ):
        self.url_template = url_template
        self.field_mapping = dict(field_mapping or {})
        self.timeout = timeout
        self.descriptor = SourceDescriptor(
            source_id="generic_http",
            name="Generic JSON-over-HTTP endpoint",
            mode=FREE,
            param_schema=dict(_QUERY_PARAMS),
        )

    def _fetch(self, query: str, limit: int, credentials) -> list[RawRecord]:
        url = self.url_template.format(query=query, limit=limit)
        try:
            resp = httpx.get(url, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise ConnectorError(
                "SOURCE_UNREACHABLE", f"generic_http: {type(exc).__name__}"
            ) from exc
        if resp.status_code == 429:
            raise ConnectorError("RATE_LIMITED", "generic_http: source rate limit hit")
        if resp.status_code != 200:
            raise ConnectorError("SOURCE_UNREACHABLE", f"generic_http: HTTP {resp.status_code}")
        try:
            body = resp.json()
        except ValueError as exc:
            raise ConnectorError("SOURCE_UNREACHABLE", "generic_http: response is not JSON") from exc
        if not isinstance(body, list):
            raise ConnectorError("SOURCE_UNREACHABLE", "generic_http: expected a JSON array")
        records = []
        for i, obj in enumerate(body, start=1):
            if not isinstance(obj, dict):
                continue
            fields = {}
            for target, source_key in (self.field_mapping or {}).items():
                if source_key in obj and obj[source_key] is not None:
                    fields[target] = str(obj[source_key])
            if not self.field_mapping:
                fields = {str(k): str(v) for k, v in obj.items() if v is not None}
            records.append(RawRecord(row_index=i, fields=fields, source_format="json"))
        return records


class CredentialedStubSource(Source):
    """Stand-in for platform connectors that need an API key.

    Proves the credential pass-through contract: it refuses calls without a
    key and returns deterministic records when one is supplied, without
    ever echoing the key anywhere.
    """

    def __init__(self):
        self.descriptor = SourceDescriptor(
            source_id="credentialed_stub",
            name="Credentialed platform stub",
            mode=CREDENTIALED,
            param_schema=dict(_QUERY_PARAMS),
            credential_schema={"api_key": {"type": "string", "required": True}},
        )

    def _fetch(self, query: str, limit: int, credentials) -> list[RawRecord]:
        log.info("credentialed_stub search query=%r limit=%d (credentials attached)", query, limit)
        records = []
        for i in range(1, limit + 1):
            records.append(
                RawRecord(
                    row_index=i,
                    fields={
                        "id": f"stub-{query}-{i}",
                        "text": f"platform result {i} for {query}",
                        "timestamp": f"2024-03-{min(i, 28):02d}T12:00:00Z",
                        "author": f"platform_user_{i % 5}",
                    },
                    source_format="json",
                )
            )
        return records


class SourceRegistry:
    def __init__(self, include_builtin: bool = True):
        self._sources: dict[str, Source] = {}
        if include_builtin:
            self.register(MockLocalSource())
            self.register(GenericHttpSource())
            self.register(CredentialedStubSource())

    def register(self, source: Source) -> None:
        self._sources[source.descriptor.source_id] = source

    def get(self, source_id: str) -> Source:
        if source_id not in self._sources:
            raise ConnectorError("UNKNOWN_SOURCE", f"no source {source_id!r}")
        return self._sources[source_id]

    def list_sources(self) -> list[SourceDescriptor]:
        return [self._sources[k].descriptor for k in sorted(self._sources)]
