import io
import json
import time

import pytest
from fastapi.testclient import TestClient

from marsad.api import create_app
from marsad.config import Config
from marsad.engine import Engine

TOKEN = "test-token-1"
AUTH = {"Authorization": f"Bearer {TOKEN}"}

CSV_3ROWS = (
    "id,text,timestamp\n"
    "1,hello world,2024-01-01T00:00:00Z\n"
    "2,more text here,2024-01-02T00:00:00Z\n"
    "3,final row,2024-01-03T00:00:00Z\n"
)


@pytest.fixture
def client(tmp_path):
    cfg = Config(data_dir=tmp_path / "data", tokens={"tester": TOKEN, "other": "second-token"})
    engine = Engine(cfg)
    app = create_app(engine, cfg, start_worker=False)
    with TestClient(app) as c:
        yield c


def upload(client, content=CSV_3ROWS, fmt="csv", name="up"):
    resp = client.post(
        "/v1/datasets",
        headers=AUTH,
        files={"file": ("posts.csv", io.BytesIO(content.encode()), "text/csv")},
        data={"format": fmt, "name": name},
    )
    return resp


def run_one_job(client, dataset_id, kind, seed=7):
    resp = client.post("/v1/jobs", headers=AUTH, json={"dataset_id": dataset_id, "kind": kind, "seed": seed})
    assert resp.status_code == 201
    job_id = resp.json()["job_id"]
    # execute synchronously through the engine the app holds
    engine: Engine = client.app.state.engine
    job = engine.queue.next_runnable()
    while job is not None:
        engine._run_claimed(job)
        if job.job_id == job_id:
            break
        job = engine.queue.next_runnable()
    return job_id


class TestAuth:
    def test_valid_token_accepted(self, client):
        assert client.get("/v1/datasets", headers=AUTH).status_code == 200

    def test_missing_header_401(self, client):
        assert client.get("/v1/datasets").status_code == 401

    def test_token_last_byte_flip_401(self, client):
        bad = {"Authorization": f"Bearer {TOKEN[:-1]}X"}
        assert client.get("/v1/datasets", headers=bad).status_code == 401

    def test_second_configured_token_works(self, client):
        assert client.get("/v1/datasets", headers={"Authorization": "Bearer second-token"}).status_code == 200

    def test_health_is_open(self, client):
        assert client.get("/v1/health").status_code == 200


class TestUpload:
    def test_valid_csv_201_with_report(self, client):
        resp = upload(client)
        assert resp.status_code == 201
        body = resp.json()
        assert body["validation_report"]["accepted"] == 3
        assert body["dataset_id"]

    def test_bad_rows_reported(self, client):
        content = CSV_3ROWS + "4,bad stamp,not-a-date\n"
        resp = upload(client, content)
        assert resp.status_code == 201
        rejected = resp.json()["validation_report"]["rejected"]
        assert [(e["row_index"], e["error_code"]) for e in rejected] == [(4, "BAD_TIMESTAMP")]

    def test_all_rows_bad_422_with_report(self, client):
        resp = upload(client, "id,text,timestamp\n1,,2024-01-01T00:00:00Z\n")
        assert resp.status_code == 422
        body = resp.json()
        assert body["validation_report"]["accepted"] == 0
        assert body["error"]["code"] == "EMPTY_DATASET"

    def test_unknown_format_422(self, client):
        resp = upload(client, fmt="xml")
        assert resp.status_code == 422

    def test_get_dataset_and_listing(self, client):
        ds = upload(client).json()["dataset_id"]
        one = client.get(f"/v1/datasets/{ds}", headers=AUTH)
        assert one.status_code == 200
        assert one.json()["metadata"]["n_posts"] == 3
        listing = client.get("/v1/datasets", headers=AUTH).json()["datasets"]
        assert ds in [d["dataset_id"] for d in listing]

    def test_unknown_dataset_404(self, client):
        assert client.get(f"/v1/datasets/{'0' * 32}", headers=AUTH).status_code == 404


class TestJobs:
    def test_submit_then_poll_queued(self, client):
        ds = upload(client).json()["dataset_id"]
        job_id = client.post(
            "/v1/jobs", headers=AUTH, json={"dataset_id": ds, "kind": "sentiment"}
        ).json()["job_id"]
        job = client.get(f"/v1/jobs/{job_id}", headers=AUTH).json()
        assert job["state"] == "queued"
        assert job["queue_position"] == 0

    def test_duplicate_submit_409(self, client):
        ds = upload(client).json()["dataset_id"]
        body = {"dataset_id": ds, "kind": "sentiment"}
        assert client.post("/v1/jobs", headers=AUTH, json=body).status_code == 201
        resp = client.post("/v1/jobs", headers=AUTH, json=body)
        assert resp.status_code == 409
        assert resp.json()["error"]["code"] == "DUPLICATE_JOB"

    def test_unknown_dataset_404(self, client):
        resp = client.post("/v1/jobs", headers=AUTH, json={"dataset_id": "0" * 32, "kind": "sentiment"})
        assert resp.status_code == 404

    def test_unknown_kind_422(self, client):
        ds = upload(client).json()["dataset_id"]
        resp = client.post("/v1/jobs", headers=AUTH, json={"dataset_id": ds, "kind": "astrology"})
        assert resp.status_code == 422

    def test_cancel_queued_job(self, client):
        ds = upload(client).json()["dataset_id"]
        job_id = client.post("/v1/jobs", headers=AUTH, json={"dataset_id": ds, "kind": "network"}).json()["job_id"]
        resp = client.delete(f"/v1/jobs/{job_id}", headers=AUTH)
        assert resp.status_code == 200 and resp.json()["state"] == "cancelled"
        resp = client.delete(f"/v1/jobs/{job_id}", headers=AUTH)
        assert resp.status_code == 409

    def test_submit_latency_under_100ms_with_deep_queue(self, client):
        ds = upload(client).json()["dataset_id"]
        for kind in ("subtopics", "wordcloud", "network", "trends", "spatial", "propaganda", "post_analysis"):
            client.post("/v1/jobs", headers=AUTH, json={"dataset_id": ds, "kind": kind})
        t0 = time.perf_counter()
        resp = client.post("/v1/jobs", headers=AUTH, json={"dataset_id": ds, "kind": "sentiment"})
        elapsed = time.perf_counter() - t0
        assert resp.status_code == 201
        assert elapsed < 0.1


class TestResultsAndExport:
    def test_sentiment_job_results_retrievable(self, client):
        ds = upload(client).json()["dataset_id"]
        job_id = run_one_job(client, ds, "sentiment")
        job = client.get(f"/v1/jobs/{job_id}", headers=AUTH).json()
        assert job["state"] == "done"
        results = client.get(f"/v1/datasets/{ds}/results", headers=AUTH, params={"kind": "sentiment"}).json()
        assert len(results["results"]) == 1
        assert results["results"][0]["payload"]["summary"]["neutral"] == 3

    def test_export_csv_golden(self, client):
        ds = upload(client).json()["dataset_id"]
        job_id = run_one_job(client, ds, "sentiment")
        resp = client.get(f"/v1/export/{job_id}", headers=AUTH, params={"format": "csv"})
        assert resp.status_code == 200
        expected = (
            "post_id,label,score,degree\n"
            "1,neutral,0.0,0.0\n"
            "2,neutral,0.0,0.0\n"
            "3,neutral,0.0,0.0\n"
        )
        assert resp.text == expected
        assert "attachment" in resp.headers["Content-Disposition"]

    def test_export_json_contains_payload_only(self, client):
        ds = upload(client).json()["dataset_id"]
        job_id = run_one_job(client, ds, "wordcloud")
        doc = json.loads(client.get(f"/v1/export/{job_id}", headers=AUTH, params={"format": "json"}).content)
        assert set(doc) == {"kind", "payload"}

    def test_export_unfinished_job_409(self, client):
        ds = upload(client).json()["dataset_id"]
        job_id = client.post("/v1/jobs", headers=AUTH, json={"dataset_id": ds, "kind": "trends"}).json()["job_id"]
        assert client.get(f"/v1/export/{job_id}", headers=AUTH).status_code == 409


class TestAnnotationsAndFeedback:
    def test_annotation_round_trip(self, client):
        ds = upload(client).json()["dataset_id"]
        resp = client.post(
            "/v1/annotations",
            headers=AUTH,
            json={
                "dataset_id": ds, "post_id": "1", "kind": "sentiment",
                "old_label": "neutral", "new_label": "positive", "annotator": "k",
            },
        )
        assert resp.status_code == 201
        listed = client.get(f"/v1/datasets/{ds}/annotations", headers=AUTH).json()["annotations"]
        assert len(listed) == 1 and listed[0]["new_label"] == "positive"

    def test_unknown_post_404(self, client):
        ds = upload(client).json()["dataset_id"]
        resp = client.post(
            "/v1/annotations",
            headers=AUTH,
            json={
                "dataset_id": ds, "post_id": "zzz", "kind": "sentiment",
                "old_label": "neutral", "new_label": "positive",
            },
        )
        assert resp.status_code == 404

    def test_feedback_apply_bumps_lexicon_version(self, client):
        content = "id,text,timestamp\n" + "".join(
            f"{i},glorpastic day number {i},2024-01-0{i}T00:00:00Z\n" for i in (1, 2, 3)
        )
        ds = upload(client, content).json()["dataset_id"]
        for post_id in ("1", "2", "3"):
            client.post(
                "/v1/annotations",
                headers=AUTH,
                json={
                    "dataset_id": ds, "post_id": post_id, "kind": "sentiment",
                    "old_label": "neutral", "new_label": "positive",
                },
            )
        outcome = client.post("/v1/feedback/apply", headers=AUTH, json={"dataset_id": ds}).json()
        assert outcome["lexicon_version"] == outcome["previous_version"] + 1
        assert "glorpastic" in outcome["added_positive"]


class TestSources:
    def test_list_sources(self, client):
        sources = client.get("/v1/sources", headers=AUTH).json()["sources"]
        assert [s["source_id"] for s in sources] == ["credentialed_stub", "generic_http", "mock_local"]

    def test_search_without_save_is_side_effect_free(self, client):
        before = client.get("/v1/datasets", headers=AUTH).json()["datasets"]
        resp = client.post(
            "/v1/sources/mock_local/search", headers=AUTH, json={"query": "doha", "limit": 5}
        )
        assert resp.status_code == 200 and resp.json()["count"] == 5
        after = client.get("/v1/datasets", headers=AUTH).json()["datasets"]
        assert before == after

    def test_search_save_as_creates_dataset(self, client):
        resp = client.post(
            "/v1/sources/mock_local/search",
            headers=AUTH,
            json={"query": "doha", "limit": 5, "save_as": "doha-batch"},
        )
        body = resp.json()
        assert body["dataset_id"]
        assert body["validation_report"]["accepted"] == 5

    def test_credentialed_stub_without_token_422(self, client):
        resp = client.post("/v1/sources/credentialed_stub/search", headers=AUTH, json={"query": "x"})
        assert resp.status_code == 422
        assert resp.json()["error"]["code"] == "CREDENTIALS_REQUIRED"
