"""Upload parsing and validation.

``parse_dataset`` is the single entry point for every byte stream entering
the engine (file uploads and connector downloads alike).  It guarantees
conservation: every input row is either an accepted Post or a rejected row
in the report, never silently dropped.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from typing import Iterable, Iterator

from ..errors import IngestError
from .normalize import builtin_stopwords, detect_lang, normalize_text, tokenize
from .schema import (
    DatasetMetadata,
    Geo,
    Post,
    PostSchema,
    RawRecord,
    RowError,
    ValidationReport,
    format_timestamp,
    parse_timestamp,
)

FORMATS = ("csv", "tsv", "json", "jsonl")

_MENTION_SPLIT_RE = re.compile(r"[,;\s]+")

# Row-level error codes
MISSING_FIELD = "MISSING_FIELD"
TYPE_MISMATCH = "TYPE_MISMATCH"
BAD_TIMESTAMP = "BAD_TIMESTAMP"
EMPTY_TEXT = "EMPTY_TEXT"
DUP_ID = "DUP_ID"


def parse_dataset(
    data: bytes,
    format: str,
    schema: PostSchema | None = None,
    stopwords: Iterable[str] | None = None,
) -> tuple[list[Post], ValidationReport]:
    """Parse and validate an uploaded byte stream.

    Returns accepted posts plus a report; ``accepted + len(rejected)``
    always equals the number of input rows.  Raises :class:`IngestError`
    with UNKNOWN_FORMAT or UNDECODABLE_INPUT for stream-level failures
    (including structurally invalid JSON where no rows can be delimited).
    """
    fmt = format.lower()
    if fmt not in FORMATS:
        raise IngestError("UNKNOWN_FORMAT", f"unsupported format {format!r}")
    if schema is None:
        schema = PostSchema()
    if stopwords is None:
        stops = builtin_stopwords()
    else:
        stops = frozenset(normalize_text(w) for w in stopwords)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IngestError("UNDECODABLE_INPUT", f"input is not valid UTF-8: {exc}") from exc

    if fmt in ("csv", "tsv"):
        rows = _iter_delimited(text, "\t" if fmt == "tsv" else ",")
    elif fmt == "jsonl":
        rows = _iter_jsonl(text)
    else:
        rows = _iter_json(text)
    return validate_records(rows, schema, stops)


def validate_records(
    rows: Iterable[RawRecord | RowError],
    schema: PostSchema | None = None,
    stopwords: frozenset[str] | None = None,
) -> tuple[list[Post], ValidationReport]:
    """Validate pre-delimited records (uploads and connector results share
    this path).  Conservation holds: every row is accepted or rejected."""
    if schema is None:
        schema = PostSchema()
    stops = stopwords if stopwords is not None else builtin_stopwords()
    posts: list[Post] = []
    rejected: list[RowError] = []
    seen_ids: set[str] = set()
    for item in rows:
        if isinstance(item, RowError):
            rejected.append(item)
            continue
        result = validate_record(item, schema, stops, seen_ids)
        if isinstance(result, RowError):
            rejected.append(result)
        else:
            seen_ids.add(result.id)
            posts.append(result)
    return posts, ValidationReport(accepted=len(posts), rejected=rejected)


def _stringify(value) -> str | None:
    """Map a JSON value onto the RawRecord string representation."""
    if value is None:
        return None
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, float)):
        return json.dumps(value)
    return json.dumps(value, ensure_ascii=False)


def _iter_delimited(text: str, delimiter: str) -> Iterator[RawRecord | RowError]:
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        return
    header = [h.strip() for h in header]
    for row_index, row in enumerate(reader, start=1):
        if not row:
            continue
        fields = {}
        for name, cell in zip(header, row):
            if name and cell != "":
                fields[name] = cell
        yield RawRecord(row_index=row_index, fields=fields, source_format="csv")


def _iter_jsonl(text: str) -> Iterator[RawRecord | RowError]:
    row_index = 0
    for line in text.splitlines():
        if not line.strip():
            continue
        row_index += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            yield RowError(row_index, TYPE_MISMATCH, f"invalid JSON: {exc.msg}")
            continue
        yield from _record_from_obj(obj, row_index)


def _iter_json(text: str) -> Iterator[RawRecord | RowError]:
    try:
        parsed = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IngestError("UNDECODABLE_INPUT", f"invalid JSON document: {exc.msg}") from exc
    if not isinstance(parsed, list):
        raise IngestError("UNDECODABLE_INPUT", "JSON input must be an array of objects")
    for row_index, obj in enumerate(parsed, start=1):
        yield from _record_from_obj(obj, row_index)


def _record_from_obj(obj, row_index: int) -> Iterator[RawRecord | RowError]:
    if not isinstance(obj, dict):
        yield RowError(row_index, TYPE_MISMATCH, "row is not a JSON object")
        return
    fields = {}
    for key, value in obj.items():
        s = _stringify(value)
        if s is not None:
            fields[str(key)] = s
    yield RawRecord(row_index=row_index, fields=fields, source_format="json")


def _parse_mentions(value: str) -> list[str]:
    """Accept a JSON array string or a comma/space separated list."""
    try:
        parsed = json.loads(value)
        if isinstance(parsed, list):
            return [str(m).lstrip("@").strip() for m in parsed if str(m).strip()]
    except (json.JSONDecodeError, TypeError):
        pass
    return [m.lstrip("@") for m in _MENTION_SPLIT_RE.split(value.strip()) if m.lstrip("@")]


def _normalize_lang(value: str) -> str:
    v = value.strip().lower()
    if v.startswith("ar"):
        return "ar"
    if v.startswith("en"):
        return "en"
    return "unknown"


def validate_record(
    rec: RawRecord,
    schema: PostSchema,
    stopwords: frozenset[str],
    seen_ids: set[str],
) -> Post | RowError:
    """Validate one raw record against the schema.

    Checks run in a fixed order (presence, text emptiness, typed values,
    duplicate id) so a row with several defects reports deterministically.
    """

    def err(code: str, message: str) -> RowError:
        return RowError(rec.row_index, code, message)

    field_order = [f for f in ("id", "text", "timestamp") if f in schema.required]
    field_order += sorted(schema.required - {"id", "text", "timestamp"})

    for name in field_order:
        if name == "text":
            continue  # handled below with its own error code
        if name not in rec.fields or not rec.fields[name].strip():
            return err(MISSING_FIELD, f"required field {name!r} missing")

    if "text" in schema.required and "text" not in rec.fields:
        return err(MISSING_FIELD, "required field 'text' missing")
    raw_text = rec.fields.get("text", "")
    if not raw_text.strip():
        return err(EMPTY_TEXT, "text is empty")

    try:
        values = _parse_typed_fields(rec, schema)
    except _RowFailure as failure:
        return err(failure.code, failure.message)

    post_id = values["id"]
    if post_id in seen_ids:
        return err(DUP_ID, f"duplicate id {post_id!r}")

    norm_text = normalize_text(raw_text)
    if not norm_text:
        return err(EMPTY_TEXT, "text is empty after normalization")

    lang = values.get("lang") or detect_lang(raw_text)
    return Post(
        id=post_id,
        text=raw_text,
        norm_text=norm_text,
        tokens=tokenize(norm_text, stopwords),
        timestamp=values["timestamp"],
        author=values.get("author"),
        geo=values.get("geo"),
        parent_id=values.get("parent_id"),
        mentions=values.get("mentions", []),
        likes=values.get("likes", 0),
        shares=values.get("shares", 0),
        lang=lang,
    )


class _RowFailure(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message


def _parse_typed_fields(rec: RawRecord, schema: PostSchema) -> dict:
    values: dict = {}
    known = schema.required | schema.optional
    for name in ("id", "text", "timestamp", *sorted(known - {"id", "text", "timestamp"})):
        if name not in known or name not in rec.fields:
            continue
        raw = rec.fields[name].strip()
        if not raw:
            continue
        ftype = schema.type_map[name]
        if ftype == "iso8601-timestamp":
            try:
                values[name] = parse_timestamp(raw)
            except ValueError as exc:
                raise _RowFailure(BAD_TIMESTAMP, f"field {name!r}: {exc}") from exc
        elif ftype == "integer":
            try:
                iv = int(raw)
            except ValueError as exc:
                raise _RowFailure(TYPE_MISMATCH, f"field {name!r}: not an integer") from exc
            if name in ("likes", "shares") and iv < 0:
                raise _RowFailure(TYPE_MISMATCH, f"field {name!r}: negative count")
            values[name] = iv
        elif ftype == "float":
            try:
                fv = float(raw)
            except ValueError as exc:
                raise _RowFailure(TYPE_MISMATCH, f"field {name!r}: not a number") from exc
            if not math.isfinite(fv):
                raise _RowFailure(TYPE_MISMATCH, f"field {name!r}: not finite")
            values[name] = fv
        elif name == "mentions":
            values[name] = _parse_mentions(raw)
        elif name == "lang":
            values[name] = _normalize_lang(raw)
        else:
            values[name] = raw

    lat, lon = values.pop("lat", None), values.pop("lon", None)
    if (lat is None) != (lon is None):
        raise _RowFailure(TYPE_MISMATCH, "lat and lon must be provided together")
    if lat is not None:
        if not -90.0 <= lat <= 90.0:
            raise _RowFailure(TYPE_MISMATCH, f"lat {lat} outside [-90, 90]")
        if not -180.0 <= lon <= 180.0:
            raise _RowFailure(TYPE_MISMATCH, f"lon {lon} outside [-180, 180]")
        values["geo"] = Geo(lat=lat, lon=lon)
    return values


def infer_metadata(posts: list[Post]) -> DatasetMetadata:
    """Summarize a validated dataset.

    Fill rates measure how many posts carry usable data per optional field
    (non-null author/geo/parent, non-empty mentions, positive counts,
    detected language).
    """
    if not posts:
        raise IngestError("EMPTY_DATASET", "cannot infer metadata of an empty dataset")
    n = len(posts)
    times = [p.timestamp for p in posts]
    lang_counts: dict[str, int] = {}
    for p in posts:
        lang_counts[p.lang] = lang_counts.get(p.lang, 0) + 1
    fills = {
        "author": sum(1 for p in posts if p.author is not None) / n,
        "geo": sum(1 for p in posts if p.geo is not None) / n,
        "parent_id": sum(1 for p in posts if p.parent_id is not None) / n,
        "mentions": sum(1 for p in posts if p.mentions) / n,
        "likes": sum(1 for p in posts if p.likes > 0) / n,
        "shares": sum(1 for p in posts if p.shares > 0) / n,
    }
    return DatasetMetadata(
        n_posts=n,
        time_range=(format_timestamp(min(times)), format_timestamp(max(times))),
        lang_counts=dict(sorted(lang_counts.items())),
        field_fill_rates=fills,
    )
