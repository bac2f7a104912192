"""Priority FIFO job queue with a single-worker default.

Lifecycle: ``queued -> running -> done|failed`` and ``queued -> cancelled``.
Scheduling is atomic under one lock, so with ``worker_limit=1`` the
execution trace is strictly serial; equal-priority jobs run in submission
order.  Jobs found ``running`` at startup are reset to ``queued``
(at-least-once execution; analyses are idempotent).

Terminal transitions emit a notification: state is always observable by
polling, and a webhook URL registered with the job receives a POST of
``{job_id, state, dataset_id, kind}``.
"""

from __future__ import annotations

import json
import logging
import threading
import time
import urllib.request
from dataclasses import dataclass
from typing import Callable

from .errors import JobError
from .store import KINDS, AnalysisResult, Storage, new_id, utcnow_iso

log = logging.getLogger("marsad.jobs")

STATES = ("queued", "running", "done", "failed", "cancelled")
TERMINAL_STATES = ("done", "failed", "cancelled")
DEFAULT_PRIORITY = 100


@dataclass
class AnalysisJob:
    job_id: str
    dataset_id: str
    kind: str
    priority: int
    state: str
    submitted_at: str
    started_at: str | None = None
    finished_at: str | None = None
    error: str | None = None
    webhook: str | None = None
    params: dict | None = None

    @classmethod
    def from_row(cls, row: dict) -> "AnalysisJob":
        return cls(
            job_id=row["job_id"],
            dataset_id=row["dataset_id"],
            kind=row["kind"],
            priority=row["priority"],
            state=row["state"],
            submitted_at=row["submitted_at"],
            started_at=row["started_at"],
            finished_at=row["finished_at"],
            error=row["error"],
            webhook=row["webhook"],
            params=json.loads(row["params"]) if row["params"] else None,
        )

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "dataset_id": self.dataset_id,
            "kind": self.kind,
            "priority": self.priority,
            "state": self.state,
            "submitted_at": self.submitted_at,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "error": self.error,
            "webhook": self.webhook,
            "params": self.params,
        }


def _post_webhook(url: str, payload: dict, timeout: float) -> None:
    body = json.dumps(payload).encode("utf-8")
    req = urllib.request.Request(url, data=body, headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req, timeout=timeout) as resp:
        resp.read()


class JobQueue:
    """Shared, thread-safe scheduler over the persisted jobs table."""

    def __init__(
        self,
        storage: Storage,
        worker_limit: int = 1,
        webhook_timeout: float = 5.0,
        webhook_poster: Callable[[str, dict, float], None] = _post_webhook,
    ):
        self.storage = storage
        self.worker_limit = worker_limit
        self.webhook_timeout = webhook_timeout
        self._webhook_poster = webhook_poster
        self._lock = threading.Lock()
        requeued = storage.reset_running_jobs()
        if requeued:
            log.info("requeued %d interrupted job(s) at startup", requeued)

    # -- submission and lifecycle -----------------------------------------

    def submit(
        self,
        dataset_id: str,
        kind: str,
        priority: int = DEFAULT_PRIORITY,
        webhook: str | None = None,
        params: dict | None = None,
    ) -> str:
        if kind not in KINDS:
            raise JobError("UNKNOWN_KIND", f"unknown analysis kind {kind!r}")
        if not self.storage.dataset_exists(dataset_id):
            raise JobError("UNKNOWN_DATASET", f"dataset {dataset_id!r} not found")
        with self._lock:
            active = self.storage.list_job_rows(dataset_id=dataset_id, states=("queued", "running"))
            if any(r["kind"] == kind for r in active):
                raise JobError(
                    "DUPLICATE_JOB", f"a {kind} job for this dataset is already queued or running"
                )
            job_id = new_id()
            self.storage.insert_job(
                {
                    "job_id": job_id,
                    "dataset_id": dataset_id,
                    "kind": kind,
                    "priority": priority,
                    "state": "queued",
                    "submitted_at": utcnow_iso(),
                    "started_at": None,
                    "finished_at": None,
                    "error": None,
                    "webhook": webhook,
                    "params": json.dumps(params) if params else None,
                }
            )
        return job_id

    def get(self, job_id: str) -> AnalysisJob:
        row = self.storage.get_job_row(job_id)
        if row is None:
            raise JobError("UNKNOWN_JOB", f"job {job_id!r} not found")
        return AnalysisJob.from_row(row)

    def queue_position(self, job_id: str) -> int | None:
        """0-based position among queued jobs; None once not queued."""
        job = self.get(job_id)
        if job.state != "queued":
            return None
        return self.storage.queued_ahead(job_id)

    def next_runnable(self) -> AnalysisJob | None:
        """Claim the next job if a worker slot is free.

        Atomic: picks the lowest (priority, submission order) queued job and
        flips it to running; no two callers can claim the same job.
        """
        with self._lock:
            if self.storage.count_jobs(("running",)) >= self.worker_limit:
                return None
            row = self.storage.next_queued_job()
            if row is None:
                return None
            ok = self.storage.update_job(
                row["job_id"],
                expected_states=("queued",),
                updates={"state": "running", "started_at": utcnow_iso()},
            )
            if not ok:  # pragma: no cover - guarded by the lock
                return None
        self.storage.advance_dataset_status(row["dataset_id"], "analyzing")
        return self.get(row["job_id"])

    def complete(self, job_id: str, payload: dict | None = None, error: str | None = None) -> AnalysisJob:
        """Finish a running job: done (payload persisted first) or failed."""
        if (payload is None) == (error is None):
            raise ValueError("exactly one of payload/error must be given")
        job = self.get(job_id)
        now = utcnow_iso()
        if error is not None:
            ok = self.storage.complete_job_with_result(
                job_id, {"state": "failed", "finished_at": now, "error": error}, None
            )
        else:
            result = AnalysisResult(
                job_id=job_id,
                dataset_id=job.dataset_id,
                kind=job.kind,
                payload=payload,
                produced_at=now,
            )
            ok = self.storage.complete_job_with_result(
                job_id, {"state": "done", "finished_at": now}, result
            )
        if not ok:
            raise JobError("ILLEGAL_TRANSITION", f"job {job_id!r} is not running")
        if error is None:
            self.storage.advance_dataset_status(job.dataset_id, "analyzed")
        job = self.get(job_id)
        self._notify(job)
        return job

    def cancel(self, job_id: str) -> AnalysisJob:
        job = self.get(job_id)  # raises UNKNOWN_JOB first
        ok = self.storage.update_job(
            job_id,
            expected_states=("queued",),
            updates={"state": "cancelled", "finished_at": utcnow_iso()},
        )
        if not ok:
            raise JobError("ILLEGAL_TRANSITION", f"job {job_id!r} is not queued (state={job.state})")
        job = self.get(job_id)
        self._notify(job)
        return job

    def list(
        self,
        dataset_id: str | None = None,
        limit: int | None = None,
        after: str | None = None,
    ) -> list[AnalysisJob]:
        rows = self.storage.list_job_rows(dataset_id=dataset_id, limit=limit, after=after)
        return [AnalysisJob.from_row(r) for r in rows]

    # -- notifications -----------------------------------------------------

    def _notify(self, job: AnalysisJob) -> None:
        if job.state not in TERMINAL_STATES or not job.webhook:
            return
        payload = {
            "job_id": job.job_id,
            "state": job.state,
            "dataset_id": job.dataset_id,
            "kind": job.kind,
        }
        try:
            self._webhook_poster(job.webhook, payload, self.webhook_timeout)
        except Exception as exc:  # webhook failures never break job completion
            log.warning("webhook delivery to %s failed: %s", job.webhook, exc)


class Worker(threading.Thread):
    """Background loop: claim jobs, run them, record the outcome."""

    def __init__(self, queue: JobQueue, runner: Callable[[AnalysisJob], dict], poll_interval: float = 0.05):
        super().__init__(daemon=True, name="marsad-worker")
        self.queue = queue
        self.runner = runner
        self.poll_interval = poll_interval
        self._stop_event = threading.Event()

    def stop(self) -> None:
        self._stop_event.set()

    def run(self) -> None:
        while not self._stop_event.is_set():
            job = self.queue.next_runnable()
            if job is None:
                self._stop_event.wait(self.poll_interval)
                continue
            try:
                payload = self.runner(job)
            except Exception as exc:
                log.exception("job %s failed", job.job_id)
                code = getattr(exc, "code", type(exc).__name__)
                self.queue.complete(job.job_id, error=f"{code}: {exc}")
            else:
                self.queue.complete(job.job_id, payload=payload)
