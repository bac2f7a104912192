"""Hybrid persistence.

Raw posts live in an append-only document log (one ``posts.jsonl`` per
dataset); datasets, jobs, results, annotations and lexicon versions live in
embedded relational tables (SQLite).  The split mirrors a document-store /
relational-store deployment at desk scale behind one interface, so real
servers can replace either side.

On-disk layout::

    <data_dir>/marsad.db
    <data_dir>/<dataset_id>/posts.jsonl

All handles are safe to share across threads: reads run concurrently,
writes serialize per dataset (and on the single SQLite connection).
"""

from __future__ import annotations

import json
import os
import secrets
import sqlite3
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import StorageError
from .ingest import DatasetMetadata, Post

KINDS = (
    "subtopics",
    "wordcloud",
    "sentiment",
    "propaganda",
    "trends",
    "spatial",
    "network",
    "post_analysis",
)

DATASET_STATUSES = ("stored", "analyzing", "analyzed")
_STATUS_RANK = {s: i for i, s in enumerate(DATASET_STATUSES)}

# Label sets for annotatable kinds.
ANNOTATION_LABELS = {
    "sentiment": ("positive", "negative", "neutral"),
    "propaganda": ("propaganda", "clean"),
}


def new_id() -> str:
    """128-bit random id, hex-encoded."""
    return secrets.token_hex(16)


def utcnow_iso() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


@dataclass
class DatasetRecord:
    dataset_id: str
    name: str
    created_at: str
    metadata: DatasetMetadata
    status: str

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "name": self.name,
            "created_at": self.created_at,
            "metadata": self.metadata.to_dict(),
            "status": self.status,
        }


@dataclass
class AnalysisResult:
    job_id: str
    dataset_id: str
    kind: str
    payload: dict
    produced_at: str

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "dataset_id": self.dataset_id,
            "kind": self.kind,
            "payload": self.payload,
            "produced_at": self.produced_at,
        }


@dataclass
class Annotation:
    annotation_id: str
    dataset_id: str
    post_id: str
    kind: str
    old_label: str
    new_label: str
    annotator: str
    created_at: str

    def to_dict(self) -> dict:
        return {
            "annotation_id": self.annotation_id,
            "dataset_id": self.dataset_id,
            "post_id": self.post_id,
            "kind": self.kind,
            "old_label": self.old_label,
            "new_label": self.new_label,
            "annotator": self.annotator,
            "created_at": self.created_at,
        }


_SCHEMA = """
CREATE TABLE IF NOT EXISTS datasets (
    dataset_id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    created_at TEXT NOT NULL,
    metadata TEXT NOT NULL,
    status TEXT NOT NULL DEFAULT 'stored'
);
CREATE TABLE IF NOT EXISTS jobs (
    job_id TEXT PRIMARY KEY,
    dataset_id TEXT NOT NULL REFERENCES datasets(dataset_id),
    kind TEXT NOT NULL,
    priority INTEGER NOT NULL DEFAULT 100,
    state TEXT NOT NULL DEFAULT 'queued',
    submitted_at TEXT NOT NULL,
    started_at TEXT,
    finished_at TEXT,
    error TEXT,
    webhook TEXT,
    params TEXT
);
CREATE TABLE IF NOT EXISTS results (
    job_id TEXT PRIMARY KEY,
    dataset_id TEXT NOT NULL REFERENCES datasets(dataset_id),
    kind TEXT NOT NULL,
    payload TEXT NOT NULL,
    produced_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS annotations (
    annotation_id TEXT PRIMARY KEY,
    dataset_id TEXT NOT NULL REFERENCES datasets(dataset_id),
    post_id TEXT NOT NULL,
    kind TEXT NOT NULL,
    old_label TEXT NOT NULL,
    new_label TEXT NOT NULL,
    annotator TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS lexicons (
    version INTEGER PRIMARY KEY,
    kind TEXT NOT NULL,
    payload TEXT NOT NULL,
    parent INTEGER,
    created_at TEXT NOT NULL
);
"""


class Storage:
    """Thread-safe storage handle over one data directory."""

    def __init__(self, data_dir: str | os.PathLike):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._conn = sqlite3.connect(str(self.data_dir / "marsad.db"), check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._lock = threading.RLock()
        with self._lock:
            self._conn.execute("PRAGMA journal_mode=WAL")
            self._conn.executescript(_SCHEMA)
            self._conn.commit()
        self._post_ids: dict[str, frozenset[str]] = {}
        self._ds_locks: dict[str, threading.Lock] = {}
        self._ds_locks_guard = threading.Lock()

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    def _dataset_lock(self, dataset_id: str) -> threading.Lock:
        with self._ds_locks_guard:
            return self._ds_locks.setdefault(dataset_id, threading.Lock())

    # -- datasets ---------------------------------------------------------

    def put_dataset(self, posts: list[Post], metadata: DatasetMetadata, name: str = "") -> str:
        dataset_id = new_id()
        ds_dir = self.data_dir / dataset_id
        with self._dataset_lock(dataset_id):
            ds_dir.mkdir(parents=True, exist_ok=False)
            path = ds_dir / "posts.jsonl"
            with open(path, "w", encoding="utf-8") as fh:
                for p in posts:
                    fh.write(json.dumps(p.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
        with self._lock:
            self._conn.execute(
                "INSERT INTO datasets (dataset_id, name, created_at, metadata, status) VALUES (?,?,?,?,?)",
                (
                    dataset_id,
                    name or f"dataset-{dataset_id[:8]}",
                    utcnow_iso(),
                    json.dumps(metadata.to_dict(), ensure_ascii=False, sort_keys=True),
                    "stored",
                ),
            )
            self._conn.commit()
        self._post_ids[dataset_id] = frozenset(p.id for p in posts)
        return dataset_id

    def _dataset_row(self, dataset_id: str) -> sqlite3.Row:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM datasets WHERE dataset_id = ?", (dataset_id,)
            ).fetchone()
        if row is None:
            raise StorageError("NOT_FOUND", f"dataset {dataset_id!r} not found")
        return row

    def _record_from_row(self, row: sqlite3.Row) -> DatasetRecord:
        return DatasetRecord(
            dataset_id=row["dataset_id"],
            name=row["name"],
            created_at=row["created_at"],
            metadata=DatasetMetadata.from_dict(json.loads(row["metadata"])),
            status=row["status"],
        )

    def get_dataset(self, dataset_id: str) -> tuple[list[Post], DatasetRecord]:
        record = self._record_from_row(self._dataset_row(dataset_id))
        posts = self.get_posts(dataset_id)
        return posts, record

    def get_posts(self, dataset_id: str) -> list[Post]:
        self._dataset_row(dataset_id)  # existence check
        path = self.data_dir / dataset_id / "posts.jsonl"
        posts = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    posts.append(Post.from_json(json.loads(line)))
        return posts

    def dataset_exists(self, dataset_id: str) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT 1 FROM datasets WHERE dataset_id = ?", (dataset_id,)
            ).fetchone()
        return row is not None

    def post_ids(self, dataset_id: str) -> frozenset[str]:
        if dataset_id not in self._post_ids:
            self._post_ids[dataset_id] = frozenset(p.id for p in self.get_posts(dataset_id))
        return self._post_ids[dataset_id]

    def list_datasets(self, limit: int = 50, after: str | None = None) -> list[DatasetRecord]:
        """Creation-ordered page; ``after`` is the previous page's last id."""
        with self._lock:
            if after is None:
                rows = self._conn.execute(
                    "SELECT * FROM datasets ORDER BY rowid LIMIT ?", (limit,)
                ).fetchall()
            else:
                rows = self._conn.execute(
                    "SELECT * FROM datasets WHERE rowid > "
                    "(SELECT rowid FROM datasets WHERE dataset_id = ?) ORDER BY rowid LIMIT ?",
                    (after, limit),
                ).fetchall()
        return [self._record_from_row(r) for r in rows]

    def advance_dataset_status(self, dataset_id: str, status: str) -> None:
        """Move status forward (stored -> analyzing -> analyzed); backward
        transitions are ignored."""
        if status not in _STATUS_RANK:
            raise ValueError(f"unknown status {status!r}")
        with self._lock:
            row = self._dataset_row(dataset_id)
            if _STATUS_RANK[status] > _STATUS_RANK[row["status"]]:
                self._conn.execute(
                    "UPDATE datasets SET status = ? WHERE dataset_id = ?", (status, dataset_id)
                )
                self._conn.commit()

    # -- results ----------------------------------------------------------

    def put_result(self, result: AnalysisResult) -> None:
        if not self.dataset_exists(result.dataset_id):
            raise StorageError("FOREIGN_KEY", f"dataset {result.dataset_id!r} not found")
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO results (job_id, dataset_id, kind, payload, produced_at) "
                "VALUES (?,?,?,?,?)",
                (
                    result.job_id,
                    result.dataset_id,
                    result.kind,
                    json.dumps(result.payload, ensure_ascii=False, sort_keys=True),
                    result.produced_at,
                ),
            )
            self._conn.commit()

    def get_results(self, dataset_id: str, kind: str | None = None) -> list[AnalysisResult]:
        if not self.dataset_exists(dataset_id):
            raise StorageError("NOT_FOUND", f"dataset {dataset_id!r} not found")
        query = "SELECT * FROM results WHERE dataset_id = ?"
        args: list = [dataset_id]
        if kind is not None:
            query += " AND kind = ?"
            args.append(kind)
        query += " ORDER BY rowid"
        with self._lock:
            rows = self._conn.execute(query, args).fetchall()
        return [
            AnalysisResult(
                job_id=r["job_id"],
                dataset_id=r["dataset_id"],
                kind=r["kind"],
                payload=json.loads(r["payload"]),
                produced_at=r["produced_at"],
            )
            for r in rows
        ]

    def get_result_by_job(self, job_id: str) -> AnalysisResult | None:
        with self._lock:
            r = self._conn.execute("SELECT * FROM results WHERE job_id = ?", (job_id,)).fetchone()
        if r is None:
            return None
        return AnalysisResult(
            job_id=r["job_id"],
            dataset_id=r["dataset_id"],
            kind=r["kind"],
            payload=json.loads(r["payload"]),
            produced_at=r["produced_at"],
        )

    # -- annotations ------------------------------------------------------

    def record_annotation(
        self,
        dataset_id: str,
        post_id: str,
        kind: str,
        old_label: str,
        new_label: str,
        annotator: str,
    ) -> Annotation:
        if not self.dataset_exists(dataset_id):
            raise StorageError("NOT_FOUND", f"dataset {dataset_id!r} not found")
        if post_id not in self.post_ids(dataset_id):
            raise StorageError("UNKNOWN_POST", f"post {post_id!r} not in dataset")
        labels = ANNOTATION_LABELS.get(kind)
        if labels is None:
            raise StorageError("INVALID_LABEL", f"kind {kind!r} is not annotatable")
        if new_label not in labels:
            raise StorageError("INVALID_LABEL", f"label {new_label!r} not in {labels}")
        ann = Annotation(
            annotation_id=new_id(),
            dataset_id=dataset_id,
            post_id=post_id,
            kind=kind,
            old_label=old_label,
            new_label=new_label,
            annotator=annotator,
            created_at=utcnow_iso(),
        )
        with self._lock:
            self._conn.execute(
                "INSERT INTO annotations (annotation_id, dataset_id, post_id, kind, old_label, "
                "new_label, annotator, created_at) VALUES (?,?,?,?,?,?,?,?)",
                (
                    ann.annotation_id,
                    ann.dataset_id,
                    ann.post_id,
                    ann.kind,
                    ann.old_label,
                    ann.new_label,
                    ann.annotator,
                    ann.created_at,
                ),
            )
            self._conn.commit()
        return ann

    def list_annotations(self, dataset_id: str) -> list[Annotation]:
        if not self.dataset_exists(dataset_id):
            raise StorageError("NOT_FOUND", f"dataset {dataset_id!r} not found")
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM annotations WHERE dataset_id = ? ORDER BY rowid", (dataset_id,)
            ).fetchall()
        return [
            Annotation(
                annotation_id=r["annotation_id"],
                dataset_id=r["dataset_id"],
                post_id=r["post_id"],
                kind=r["kind"],
                old_label=r["old_label"],
                new_label=r["new_label"],
                annotator=r["annotator"],
                created_at=r["created_at"],
            )
            for r in rows
        ]

    # -- lexicon versions -------------------------------------------------

    def latest_lexicon(self, kind: str = "sentiment") -> tuple[int, dict] | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT version, payload FROM lexicons WHERE kind = ? ORDER BY version DESC LIMIT 1",
                (kind,),
            ).fetchone()
        if row is None:
            return None
        return int(row["version"]), json.loads(row["payload"])

    def put_lexicon(self, kind: str, version: int, payload: dict, parent: int | None) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO lexicons (version, kind, payload, parent, created_at) VALUES (?,?,?,?,?)",
                (version, kind, json.dumps(payload, ensure_ascii=False, sort_keys=True), parent, utcnow_iso()),
            )
            self._conn.commit()

    # -- job rows (state machine lives in marsad.jobs) ---------------------

    def insert_job(self, row: dict) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO jobs (job_id, dataset_id, kind, priority, state, submitted_at, "
                "started_at, finished_at, error, webhook, params) VALUES "
                "(:job_id, :dataset_id, :kind, :priority, :state, :submitted_at, "
                ":started_at, :finished_at, :error, :webhook, :params)",
                row,
            )
            self._conn.commit()

    def get_job_row(self, job_id: str) -> dict | None:
        with self._lock:
            r = self._conn.execute("SELECT * FROM jobs WHERE job_id = ?", (job_id,)).fetchone()
        return dict(r) if r is not None else None

    def list_job_rows(
        self,
        dataset_id: str | None = None,
        states: tuple[str, ...] | None = None,
        limit: int | None = None,
        after: str | None = None,
    ) -> list[dict]:
        """Jobs in submission order; ``after`` is a job_id cursor."""
        query = "SELECT * FROM jobs"
        clauses, args = [], []
        if dataset_id is not None:
            clauses.append("dataset_id = ?")
            args.append(dataset_id)
        if states:
            clauses.append(f"state IN ({','.join('?' * len(states))})")
            args.extend(states)
        if after is not None:
            clauses.append("rowid > (SELECT rowid FROM jobs WHERE job_id = ?)")
            args.append(after)
        if clauses:
            query += " WHERE " + " AND ".join(clauses)
        query += " ORDER BY rowid"
        if limit is not None:
            query += " LIMIT ?"
            args.append(limit)
        with self._lock:
            rows = self._conn.execute(query, args).fetchall()
        return [dict(r) for r in rows]

    def count_jobs(self, states: tuple[str, ...]) -> int:
        with self._lock:
            r = self._conn.execute(
                f"SELECT COUNT(*) AS n FROM jobs WHERE state IN ({','.join('?' * len(states))})",
                states,
            ).fetchone()
        return int(r["n"])

    def next_queued_job(self) -> dict | None:
        """Lowest (priority, insertion order) queued job."""
        with self._lock:
            r = self._conn.execute(
                "SELECT * FROM jobs WHERE state = 'queued' ORDER BY priority, rowid LIMIT 1"
            ).fetchone()
        return dict(r) if r is not None else None

    def queued_ahead(self, job_id: str) -> int:
        """Number of queued jobs that would be scheduled before this one."""
        with self._lock:
            me = self._conn.execute(
                "SELECT priority, rowid FROM jobs WHERE job_id = ?", (job_id,)
            ).fetchone()
            if me is None:
                return 0
            r = self._conn.execute(
                "SELECT COUNT(*) AS n FROM jobs WHERE state = 'queued' AND "
                "(priority < ? OR (priority = ? AND rowid < ?))",
                (me["priority"], me["priority"], me["rowid"]),
            ).fetchone()
        return int(r["n"])

    def update_job(self, job_id: str, expected_states: tuple[str, ...], updates: dict) -> bool:
        """Guarded update: applies only when the job is in an expected state.
        Returns whether the transition happened."""
        sets = ", ".join(f"{k} = :{k}" for k in updates)
        params = dict(updates)
        params["job_id"] = job_id
        with self._lock:
            cur = self._conn.execute(
                f"UPDATE jobs SET {sets} WHERE job_id = :job_id AND state IN "
                f"({','.join(repr(s) for s in expected_states)})",
                params,
            )
            self._conn.commit()
        return cur.rowcount > 0

    def complete_job_with_result(
        self, job_id: str, updates: dict, result: AnalysisResult | None
    ) -> bool:
        """Atomically persist the result and flip the job out of running."""
        with self._lock:
            if result is not None:
                self._conn.execute(
                    "INSERT OR REPLACE INTO results (job_id, dataset_id, kind, payload, produced_at) "
                    "VALUES (?,?,?,?,?)",
                    (
                        result.job_id,
                        result.dataset_id,
                        result.kind,
                        json.dumps(result.payload, ensure_ascii=False, sort_keys=True),
                        result.produced_at,
                    ),
                )
            sets = ", ".join(f"{k} = :{k}" for k in updates)
            params = dict(updates)
            params["job_id"] = job_id
            cur = self._conn.execute(
                f"UPDATE jobs SET {sets} WHERE job_id = :job_id AND state = 'running'",
                params,
            )
            if cur.rowcount == 0:
                self._conn.rollback()
                return False
            self._conn.commit()
        return True

    def reset_running_jobs(self) -> int:
        """Crash recovery: running jobs found at startup go back to queued."""
        with self._lock:
            cur = self._conn.execute(
                "UPDATE jobs SET state = 'queued', started_at = NULL WHERE state = 'running'"
            )
            self._conn.commit()
        return cur.rowcount
