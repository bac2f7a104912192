"""HTTP service: upload, job control, results, annotations, export and
source search, guarded by static bearer tokens.

Submitting a job never runs analysis inline; the queue decouples request
handling from execution, so submits return immediately regardless of queue
depth.  A background worker thread (started with the app when requested)
drains the queue honoring the configured worker limit.
"""

from __future__ import annotations

import hmac
import json
import logging
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import Depends, FastAPI, File, Form, Request, Response, UploadFile
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .config import Config
from .engine import Engine
from .errors import MarsadError
from .ingest import PostSchema
from .jobs import Worker
from .store import KINDS

audit = logging.getLogger("marsad.audit")

_STATUS_BY_CODE = {
    "NOT_FOUND": 404,
    "UNKNOWN_DATASET": 404,
    "UNKNOWN_POST": 404,
    "UNKNOWN_JOB": 404,
    "UNKNOWN_SOURCE": 404,
    "DUPLICATE_JOB": 409,
    "ILLEGAL_TRANSITION": 409,
    "RATE_LIMITED": 429,
    "SOURCE_UNREACHABLE": 502,
    "ADAPTER_UNREACHABLE": 502,
    "BAD_ADAPTER_RESPONSE": 502,
}
_DEFAULT_ERROR_STATUS = 422


class JobRequest(BaseModel):
    dataset_id: str
    kind: str
    priority: int = 100
    webhook: str | None = None
    seed: int | None = None
    params: dict = Field(default_factory=dict)


class AnnotationRequest(BaseModel):
    dataset_id: str
    post_id: str
    kind: str
    old_label: str
    new_label: str
    annotator: str = "anonymous"


class FeedbackRequest(BaseModel):
    dataset_id: str


class SearchRequest(BaseModel):
    query: str
    limit: int = 50
    credentials: dict[str, str] | None = None
    save_as: str | None = None


def create_app(
    engine: Engine | None = None,
    config: Config | None = None,
    start_worker: bool = False,
    static_dir: str | Path | None = None,
) -> FastAPI:
    config = config or Config()
    engine = engine or Engine(config)
    if not config.tokens:
        raise ValueError("config must list at least one auth token")

    worker: Worker | None = None

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        nonlocal worker
        if start_worker:
            worker = Worker(engine.queue, engine.run_job)
            worker.start()
        yield
        if worker is not None:
            worker.stop()

    app = FastAPI(title="marsad", version="0.1.0", lifespan=lifespan)
    app.state.engine = engine

    if config.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def require_auth(request: Request) -> str:
        header = request.headers.get("Authorization", "")
        given = header[len("Bearer ") :] if header.startswith("Bearer ") else ""
        principal = None
        for name, token in config.tokens.items():
            # constant-time comparison; scan all tokens regardless of match
            if hmac.compare_digest(token.encode(), given.encode()):
                principal = name
        if principal is None:
            raise MarsadError("UNAUTHORIZED", "missing or invalid bearer token")
        return principal

    @app.exception_handler(MarsadError)
    async def marsad_error_handler(request: Request, exc: MarsadError):
        if exc.code == "UNAUTHORIZED":
            status = 401
        else:
            status = _STATUS_BY_CODE.get(exc.code, _DEFAULT_ERROR_STATUS)
        return JSONResponse(status_code=status, content={"error": exc.to_dict()})

    @app.get("/v1/health")
    async def health():
        return {"status": "ok", "kinds": list(KINDS)}

    # -- datasets -----------------------------------------------------------

    @app.post("/v1/datasets", status_code=201)
    async def upload_dataset(
        principal: str = Depends(require_auth),
        file: UploadFile = File(...),
        format: str = Form(...),
        name: str = Form(""),
        schema_spec: str = Form("", alias="schema"),
    ):
        post_schema = PostSchema.from_dict(json.loads(schema_spec)) if schema_spec else None
        data = await file.read()
        dataset_id, report = engine.ingest_bytes(
            data, format, name=name or (file.filename or ""), schema=post_schema
        )
        audit.info("upload by %s: accepted=%d rejected=%d", principal, report.accepted, len(report.rejected))
        if dataset_id is None:
            return JSONResponse(
                status_code=422,
                content={
                    "error": {"code": "EMPTY_DATASET", "message": "no row passed validation"},
                    "validation_report": report.to_dict(),
                },
            )
        return {"dataset_id": dataset_id, "validation_report": report.to_dict()}

    @app.get("/v1/datasets")
    async def list_datasets(
        principal: str = Depends(require_auth),
        limit: int = 50,
        after: str | None = None,
    ):
        records = engine.storage.list_datasets(limit=limit, after=after)
        return {"datasets": [r.to_dict() for r in records]}

    @app.get("/v1/datasets/{dataset_id}")
    async def get_dataset(dataset_id: str, principal: str = Depends(require_auth)):
        _posts, record = engine.storage.get_dataset(dataset_id)
        return record.to_dict()

    @app.get("/v1/datasets/{dataset_id}/results")
    async def get_results(
        dataset_id: str,
        kind: str | None = None,
        principal: str = Depends(require_auth),
    ):
        results = engine.storage.get_results(dataset_id, kind=kind)
        return {"results": [r.to_dict() for r in results]}

    @app.get("/v1/datasets/{dataset_id}/posts")
    async def get_posts(
        dataset_id: str,
        limit: int = 200,
        principal: str = Depends(require_auth),
    ):
        posts = engine.storage.get_posts(dataset_id)
        return {"posts": [p.to_json() for p in posts[: max(0, limit)]]}

    # -- jobs ---------------------------------------------------------------

    @app.post("/v1/jobs", status_code=201)
    async def submit_job(body: JobRequest, principal: str = Depends(require_auth)):
        params = dict(body.params)
        if body.seed is not None:
            params["seed"] = body.seed
        job_id = engine.queue.submit(
            body.dataset_id,
            body.kind,
            priority=body.priority,
            webhook=body.webhook,
            params=params or None,
        )
        audit.info("job %s (%s on %s) submitted by %s", job_id, body.kind, body.dataset_id, principal)
        return {"job_id": job_id}

    @app.get("/v1/jobs")
    async def list_jobs(
        dataset_id: str | None = None,
        limit: int = 100,
        after: str | None = None,
        principal: str = Depends(require_auth),
    ):
        jobs = engine.queue.list(dataset_id=dataset_id, limit=limit, after=after)
        return {"jobs": [j.to_dict() for j in jobs]}

    @app.get("/v1/jobs/{job_id}")
    async def get_job(job_id: str, principal: str = Depends(require_auth)):
        job = engine.queue.get(job_id)
        doc = job.to_dict()
        doc["queue_position"] = engine.queue.queue_position(job_id)
        return doc

    @app.delete("/v1/jobs/{job_id}")
    async def cancel_job(job_id: str, principal: str = Depends(require_auth)):
        job = engine.queue.cancel(job_id)
        audit.info("job %s cancelled by %s", job_id, principal)
        return {"job_id": job.job_id, "state": job.state}

    # -- annotations & feedback ----------------------------------------------

    @app.post("/v1/annotations", status_code=201)
    async def record_annotation(body: AnnotationRequest, principal: str = Depends(require_auth)):
        ann = engine.storage.record_annotation(
            dataset_id=body.dataset_id,
            post_id=body.post_id,
            kind=body.kind,
            old_label=body.old_label,
            new_label=body.new_label,
            annotator=body.annotator or principal,
        )
        audit.info("annotation %s on %s by %s", ann.annotation_id, body.post_id, principal)
        return ann.to_dict()

    @app.get("/v1/datasets/{dataset_id}/annotations")
    async def list_annotations(dataset_id: str, principal: str = Depends(require_auth)):
        annotations = engine.storage.list_annotations(dataset_id)
        return {"annotations": [a.to_dict() for a in annotations]}

    @app.post("/v1/feedback/apply")
    async def apply_feedback(body: FeedbackRequest, principal: str = Depends(require_auth)):
        outcome = engine.apply_dataset_feedback(body.dataset_id)
        audit.info("feedback applied on %s by %s -> v%s", body.dataset_id, principal, outcome["lexicon_version"])
        return outcome

    # -- export ---------------------------------------------------------------

    @app.get("/v1/export/{job_id}")
    async def export_job(
        job_id: str,
        format: str = "json",
        principal: str = Depends(require_auth),
    ):
        body, filename, mime = engine.export_job(job_id, format=format)
        return Response(
            content=body,
            media_type=mime,
            headers={"Content-Disposition": f'attachment; filename="{filename}"'},
        )

    # -- sources ----------------------------------------------------------------

    @app.get("/v1/sources")
    async def list_sources(principal: str = Depends(require_auth)):
        return {"sources": [d.to_dict() for d in engine.registry.list_sources()]}

    @app.post("/v1/sources/{source_id}/search")
    async def search_source(
        source_id: str,
        body: SearchRequest,
        principal: str = Depends(require_auth),
    ):
        outcome = engine.search_source(
            source_id,
            body.query,
            limit=body.limit,
            credentials=body.credentials,
            save_as=body.save_as,
        )
        audit.info("source %s searched by %s (saved=%s)", source_id, principal, bool(body.save_as))
        return outcome

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/app", StaticFiles(directory=str(static_dir), html=True), name="app")

    return app
