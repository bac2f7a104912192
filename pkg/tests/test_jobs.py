import json
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from conftest import make_post
from marsad.errors import JobError
from marsad.ingest import infer_metadata
from marsad.jobs import JobQueue, Worker
from marsad.store import Storage

POSTS = [make_post("1", "hello queue")]


@pytest.fixture
def queue(storage):
    return JobQueue(storage, worker_limit=1)


@pytest.fixture
def dataset(storage):
    return storage.put_dataset(POSTS, infer_metadata(POSTS))


class TestSubmit:
    def test_submitted_job_is_queued(self, queue, dataset):
        job_id = queue.submit(dataset, "sentiment")
        assert queue.get(job_id).state == "queued"

    def test_unknown_dataset(self, queue):
        with pytest.raises(JobError) as ei:
            queue.submit("0" * 32, "sentiment")
        assert ei.value.code == "UNKNOWN_DATASET"

    def test_duplicate_while_queued(self, queue, dataset):
        queue.submit(dataset, "sentiment")
        with pytest.raises(JobError) as ei:
            queue.submit(dataset, "sentiment")
        assert ei.value.code == "DUPLICATE_JOB"

    def test_duplicate_while_running(self, queue, dataset):
        queue.submit(dataset, "sentiment")
        queue.next_runnable()
        with pytest.raises(JobError) as ei:
            queue.submit(dataset, "sentiment")
        assert ei.value.code == "DUPLICATE_JOB"

    def test_resubmit_after_terminal_is_fine(self, queue, dataset):
        first = queue.submit(dataset, "sentiment")
        queue.next_runnable()
        queue.complete(first, payload={"ok": 1})
        second = queue.submit(dataset, "sentiment")
        assert second != first

    def test_three_kinds_three_queued(self, queue, dataset):
        for kind in ("sentiment", "wordcloud", "network"):
            queue.submit(dataset, kind)
        assert sum(1 for j in queue.list() if j.state == "queued") == 3


class TestScheduling:
    def test_empty_queue_yields_nothing(self, queue):
        assert queue.next_runnable() is None

    def test_fifo_at_equal_priority(self, queue, dataset):
        a = queue.submit(dataset, "sentiment", priority=100)
        b = queue.submit(dataset, "wordcloud", priority=100)
        job = queue.next_runnable()
        assert job.job_id == a

    def test_worker_limit_one_blocks_second(self, queue, dataset):
        queue.submit(dataset, "sentiment")
        queue.submit(dataset, "wordcloud")
        first = queue.next_runnable()
        assert first is not None
        assert queue.next_runnable() is None  # one running, limit 1

    def test_lower_priority_number_runs_first(self, queue, dataset):
        queue.submit(dataset, "sentiment", priority=100)
        urgent = queue.submit(dataset, "network", priority=1)
        assert queue.next_runnable().job_id == urgent

    def test_queue_position(self, queue, dataset):
        a = queue.submit(dataset, "sentiment")
        b = queue.submit(dataset, "wordcloud")
        c = queue.submit(dataset, "network", priority=1)
        assert queue.queue_position(c) == 0
        assert queue.queue_position(a) == 1
        assert queue.queue_position(b) == 2

    def test_no_double_claim_under_concurrency(self, queue, dataset):
        for kind in ("sentiment", "wordcloud", "network", "trends"):
            queue.submit(dataset, kind)
        claimed = []

        def claim():
            job = queue.next_runnable()
            if job is not None:
                claimed.append(job.job_id)

        threads = [threading.Thread(target=claim) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(claimed) == 1  # worker_limit=1


class TestLifecycle:
    def test_complete_done_persists_result_first(self, queue, dataset, storage):
        job_id = queue.submit(dataset, "sentiment")
        queue.next_runnable()
        queue.complete(job_id, payload={"answer": 42})
        job = queue.get(job_id)
        assert job.state == "done"
        assert storage.get_result_by_job(job_id).payload == {"answer": 42}
        assert job.submitted_at <= job.started_at <= job.finished_at

    def test_complete_failed_stores_error_no_result(self, queue, dataset, storage):
        job_id = queue.submit(dataset, "sentiment")
        queue.next_runnable()
        queue.complete(job_id, error="oom")
        job = queue.get(job_id)
        assert job.state == "failed" and job.error == "oom"
        assert storage.get_result_by_job(job_id) is None

    def test_complete_on_queued_job_is_illegal(self, queue, dataset):
        job_id = queue.submit(dataset, "sentiment")
        with pytest.raises(JobError) as ei:
            queue.complete(job_id, payload={})
        assert ei.value.code == "ILLEGAL_TRANSITION"

    def test_cancel_queued(self, queue, dataset):
        job_id = queue.submit(dataset, "sentiment")
        queue.cancel(job_id)
        assert queue.get(job_id).state == "cancelled"

    def test_cancel_running_is_illegal(self, queue, dataset):
        job_id = queue.submit(dataset, "sentiment")
        queue.next_runnable()
        with pytest.raises(JobError) as ei:
            queue.cancel(job_id)
        assert ei.value.code == "ILLEGAL_TRANSITION"

    def test_cancelled_job_never_scheduled(self, queue, dataset):
        a = queue.submit(dataset, "sentiment")
        b = queue.submit(dataset, "wordcloud")
        queue.cancel(a)
        job = queue.next_runnable()
        assert job.job_id == b
        assert queue.next_runnable() is None

    def test_dataset_status_follows_jobs(self, queue, dataset, storage):
        job_id = queue.submit(dataset, "sentiment")
        queue.next_runnable()
        assert storage.get_dataset(dataset)[1].status == "analyzing"
        queue.complete(job_id, payload={})
        assert storage.get_dataset(dataset)[1].status == "analyzed"


class TestCrashRecovery:
    def test_running_job_requeued_once_on_restart(self, tmp_path):
        storage = Storage(tmp_path / "data")
        ds = storage.put_dataset(POSTS, infer_metadata(POSTS))
        queue = JobQueue(storage)
        job_id = queue.submit(ds, "sentiment")
        claimed = queue.next_runnable()
        assert claimed.job_id == job_id and claimed.state == "running"
        # crash: drop the queue, reopen over the same storage
        queue2 = JobQueue(storage)
        job = queue2.get(job_id)
        assert job.state == "queued" and job.started_at is None
        # runs exactly once after restart
        assert queue2.next_runnable().job_id == job_id
        queue2.complete(job_id, payload={"ok": True})
        # another restart leaves the finished job alone
        queue3 = JobQueue(storage)
        assert queue3.get(job_id).state == "done"
        assert queue3.next_runnable() is None
        storage.close()


class _Hook(BaseHTTPRequestHandler):
    received: list = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        _Hook.received.append(body)
        self.send_response(200)
        self.send_header("Content-Length", "0")
        self.end_headers()

    def log_message(self, *args):
        pass


class TestNotifications:
    def test_webhook_posted_on_terminal_transition(self, storage, dataset):
        server = HTTPServer(("127.0.0.1", 0), _Hook)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        _Hook.received = []
        try:
            url = f"http://127.0.0.1:{server.server_address[1]}/hook"
            queue = JobQueue(storage)
            job_id = queue.submit(dataset, "sentiment", webhook=url)
            queue.next_runnable()
            queue.complete(job_id, payload={})
            assert _Hook.received == [
                {"job_id": job_id, "state": "done", "dataset_id": dataset, "kind": "sentiment"}
            ]
        finally:
            server.shutdown()

    def test_webhook_failure_does_not_break_completion(self, storage, dataset):
        queue = JobQueue(storage)
        job_id = queue.submit(dataset, "sentiment", webhook="http://127.0.0.1:9/dead")
        queue.next_runnable()
        queue.webhook_timeout = 0.3
        queue.complete(job_id, payload={})
        assert queue.get(job_id).state == "done"


class TestWorkerThread:
    def test_worker_drains_queue_serially(self, storage, dataset):
        queue = JobQueue(storage, worker_limit=1)
        trace = []
        lock = threading.Lock()

        def runner(job):
            with lock:
                trace.append(("start", job.kind))
            time.sleep(0.01)
            with lock:
                trace.append(("end", job.kind))
            return {"kind": job.kind}

        for kind in ("sentiment", "wordcloud", "network"):
            queue.submit(dataset, kind)
        worker = Worker(queue, runner, poll_interval=0.01)
        worker.start()
        deadline = time.time() + 5
        while time.time() < deadline:
            if all(j.state == "done" for j in queue.list()):
                break
            time.sleep(0.02)
        worker.stop()
        assert [t for t in trace if t[0] == "start"] == [
            ("start", "sentiment"), ("start", "wordcloud"), ("start", "network"),
        ]
        # strictly serial: every start is preceded by the previous end
        for i in range(0, len(trace), 2):
            assert trace[i][0] == "start" and trace[i + 1] == ("end", trace[i][1])
