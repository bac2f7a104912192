"""Engine-wide error type.

Every failure the engine can signal carries a stable machine-readable code;
the API layer maps codes onto HTTP statuses and the CLI onto exit codes.
"""

from __future__ import annotations


class MarsadError(Exception):
    """Base error: a stable ``code`` plus a human-readable message."""

    def __init__(self, code: str, message: str = ""):
        self.code = code
        self.message = message or code
        super().__init__(self.message)

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


class IngestError(MarsadError):
    """Whole-upload failure: UNDECODABLE_INPUT, UNKNOWN_FORMAT, EMPTY_DATASET."""


class StorageError(MarsadError):
    """Persistence failure: NOT_FOUND, FOREIGN_KEY, UNKNOWN_POST, INVALID_LABEL."""


class JobError(MarsadError):
    """Queue failure: UNKNOWN_DATASET, DUPLICATE_JOB, ILLEGAL_TRANSITION, UNKNOWN_JOB."""


class AnalysisError(MarsadError):
    """Analytics failure: EMPTY_VOCABULARY, TOO_FEW_DOCS, K_EXCEEDS_DOCS,
    NEGATIVE_INPUT, RANK_TOO_LARGE, SERIES_TOO_SHORT, EMPTY_GRAPH."""


class AdapterError(MarsadError):
    """Classifier adapter failure: ADAPTER_UNREACHABLE, BAD_ADAPTER_RESPONSE."""


class ConnectorError(MarsadError):
    """Data-source failure: UNKNOWN_SOURCE, CREDENTIALS_REQUIRED,
    CREDENTIALS_NOT_SUPPORTED, SOURCE_UNREACHABLE, RATE_LIMITED."""
