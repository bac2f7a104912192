"""Dataset ingestion: parsing, validation, normalization, tokenization and
metadata inference."""

from .normalize import builtin_stopwords, detect_lang, normalize_text, tokenize
from .parsing import FORMATS, infer_metadata, parse_dataset, validate_record, validate_records
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

__all__ = [
    "FORMATS",
    "DatasetMetadata",
    "Geo",
    "Post",
    "PostSchema",
    "RawRecord",
    "RowError",
    "ValidationReport",
    "builtin_stopwords",
    "detect_lang",
    "format_timestamp",
    "infer_metadata",
    "normalize_text",
    "parse_dataset",
    "parse_timestamp",
    "tokenize",
    "validate_record",
    "validate_records",
]
