"""Engine: one place that wires storage, queue, sources and analytics.

Both shells (CLI and HTTP API) drive this class, so identical inputs and
seeds produce identical results regardless of entry point.  Analysis
payloads are deterministic functions of (dataset contents, seed): they
carry no run-specific identifiers or wall-clock values, which keeps CLI
output and exports byte-reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from typing import Mapping

from . import network as net
from .classify import (
    AdapterRegistry,
    Lexicon,
    apply_feedback,
    builtin_lexicon,
    builtin_patterns,
    classify_propaganda,
    classify_sentiment,
    invoke_adapter,
    post_analysis,
    rank_by_degree,
)
from .config import Config
from .connectors import SourceRegistry
from .errors import AnalysisError, IngestError, JobError, MarsadError
from .ingest import (
    PostSchema,
    ValidationReport,
    infer_metadata,
    parse_dataset,
    validate_records,
)
from .jobs import AnalysisJob, JobQueue
from .store import KINDS, Storage
from .topics import subtopic_pipeline, word_cloud
from .trends import (
    Gazetteer,
    aggregate_regions,
    bucket_terms,
    bucket_timeline,
    detect_spikes,
    extract_locations,
)

log = logging.getLogger("marsad.engine")


class Engine:
    def __init__(
        self,
        config: Config | None = None,
        storage: Storage | None = None,
        queue: JobQueue | None = None,
        registry: SourceRegistry | None = None,
    ):
        self.config = config or Config()
        self.storage = storage or Storage(self.config.data_dir)
        self.queue = queue or JobQueue(
            self.storage,
            worker_limit=self.config.worker_limit,
            webhook_timeout=self.config.webhook_timeout,
        )
        self.registry = registry or SourceRegistry()
        self.adapters = AdapterRegistry()
        self.gazetteer = Gazetteer.builtin()

    # -- ingestion ----------------------------------------------------------

    def ingest_bytes(
        self,
        data: bytes,
        format: str,
        name: str = "",
        schema: PostSchema | None = None,
        stopwords=None,
    ) -> tuple[str | None, ValidationReport]:
        """Parse, validate and (when anything survives) store a dataset.

        Returns ``(dataset_id, report)``; dataset_id is None when every row
        was rejected.
        """
        posts, report = parse_dataset(data, format, schema=schema, stopwords=stopwords)
        if not posts:
            return None, report
        dataset_id = self.storage.put_dataset(posts, infer_metadata(posts), name=name)
        return dataset_id, report

    # -- analyses -----------------------------------------------------------

    def active_lexicon(self) -> Lexicon:
        latest = self.storage.latest_lexicon("sentiment")
        if latest is None:
            return builtin_lexicon()
        _version, payload = latest
        return Lexicon.from_dict(payload)

    def run_job(self, job: AnalysisJob) -> dict:
        """Compute the payload for one claimed job."""
        posts = self.storage.get_posts(job.dataset_id)
        params = job.params or {}
        seed = int(params.get("seed", self.config.default_seed))
        kind = job.kind
        if kind == "subtopics":
            return self._analyze_subtopics(posts, seed, params)
        if kind == "wordcloud":
            return self._analyze_wordcloud(posts)
        if kind == "sentiment":
            return self._analyze_sentiment(posts)
        if kind == "propaganda":
            return self._analyze_propaganda(posts)
        if kind == "trends":
            return self._analyze_trends(posts, params)
        if kind == "spatial":
            return self._analyze_spatial(posts)
        if kind == "network":
            return self._analyze_network(posts)
        if kind == "post_analysis":
            return self._analyze_posts(posts)
        raise JobError("UNKNOWN_KIND", f"unknown analysis kind {kind!r}")

    def run_sync(
        self,
        dataset_id: str,
        kind: str,
        seed: int | None = None,
        priority: int = 100,
        params: Mapping | None = None,
    ) -> tuple[str, dict]:
        """Submit, claim, run and complete one job in-process.

        The CLI path: same queue bookkeeping as the background worker, but
        synchronous.
        """
        merged: dict = dict(params or {})
        if seed is not None:
            merged["seed"] = seed
        job_id = self.queue.submit(dataset_id, kind, priority=priority, params=merged or None)
        job = self.queue.next_runnable()
        while job is not None and job.job_id != job_id:
            # drain anything queued ahead of us (serial worker semantics);
            # a drained job's failure is recorded on that job, not ours
            try:
                self._run_claimed(job)
            except Exception:
                log.warning("job %s failed while draining the queue", job.job_id)
            job = self.queue.next_runnable()
        if job is None:
            raise JobError("ILLEGAL_TRANSITION", "queue is busy; cannot run synchronously")
        payload = self._run_claimed(job)
        return job_id, payload

    def _run_claimed(self, job: AnalysisJob) -> dict:
        try:
            payload = self.run_job(job)
        except MarsadError as exc:
            self.queue.complete(job.job_id, error=f"{exc.code}: {exc.message}")
            raise
        except Exception as exc:
            self.queue.complete(job.job_id, error=f"{type(exc).__name__}: {exc}")
            raise
        self.queue.complete(job.job_id, payload=payload)
        return payload

    def _analyze_subtopics(self, posts, seed: int, params: Mapping) -> dict:
        corpus = [p.tokens for p in posts]
        k = params.get("k")
        subtopics, clustering, vocab = subtopic_pipeline(
            corpus,
            seed=seed,
            k=int(k) if k is not None else None,
            min_df=int(params.get("min_df", 2)),
            max_df_ratio=float(params.get("max_df_ratio", 0.95)),
            top_m=int(params.get("top_m", 10)),
        )
        return {
            "seed": seed,
            "k": clustering.k,
            "n_docs": len(corpus),
            "vocab_size": len(vocab),
            "inertia": clustering.inertia,
            "clusters": [
                {
                    "cluster_id": c.cluster_id,
                    "doc_count": c.doc_count,
                    "top_terms": [{"term": t, "weight": w} for t, w in c.top_terms],
                }
                for c in subtopics.clusters
            ],
        }

    def _analyze_wordcloud(self, posts) -> dict:
        counts = word_cloud([p.tokens for p in posts])
        return {"terms": [{"term": t, "count": c} for t, c in counts]}

    def _invoke_default_adapter(self, kind: str, posts) -> list[dict]:
        """Classify through the registered default adapter (the model seam).

        The bundled defaults are the in-process baselines; swapping in an
        external HTTP adapter needs no engine change.
        """
        return invoke_adapter(
            self.adapters.default_for(kind),
            posts,
            lexicon=self.active_lexicon(),
            patterns=builtin_patterns(),
            sentiment_threshold=self.config.sentiment_threshold,
            propaganda_threshold=self.config.propaganda_threshold,
            timeout=self.config.adapter_timeout,
            max_in_flight=self.config.adapter_max_in_flight,
        )

    def _analyze_sentiment(self, posts) -> dict:
        lexicon = self.active_lexicon()
        labels = self._invoke_default_adapter("sentiment", posts)
        rows = []
        summary = {"positive": 0, "negative": 0, "neutral": 0, "errors": 0}
        for item in labels:
            if "error" in item:
                summary["errors"] += 1
                rows.append({"post_id": item["id"], "error": item["error"]})
                continue
            summary[item["label"]] += 1
            rows.append({"post_id": item["id"], "label": item["label"], "score": item["score"]})
        if summary["errors"] == 0:
            del summary["errors"]
        return {
            "adapter": self.adapters.default_for("sentiment").adapter_id,
            "lexicon_version": lexicon.version,
            "threshold": self.config.sentiment_threshold,
            "summary": summary,
            "posts": rows,
        }

    def _analyze_propaganda(self, posts) -> dict:
        patterns = builtin_patterns()
        labels = self._invoke_default_adapter("propaganda", posts)
        rows = []
        flagged = 0
        errors = 0
        for item in labels:
            if "error" in item:
                errors += 1
                rows.append({"post_id": item["id"], "error": item["error"]})
                continue
            flag = item["label"] == "propaganda"
            flagged += int(flag)
            rows.append(
                {
                    "post_id": item["id"],
                    "flag": flag,
                    "score": item["score"],
                    "technique": item.get("technique"),
                    "spans": item.get("spans", []),
                }
            )
        summary = {"flagged": flagged, "total": len(posts)}
        if errors:
            summary["errors"] = errors
        return {
            "adapter": self.adapters.default_for("propaganda").adapter_id,
            "pattern_version": patterns.version,
            "threshold": self.config.propaganda_threshold,
            "summary": summary,
            "posts": rows,
        }

    def _analyze_trends(self, posts, params: Mapping) -> dict:
        granularity = params.get("granularity", "day")
        window = int(params.get("window", self.config.spike_window))
        z_threshold = float(params.get("z_threshold", self.config.spike_z_threshold))
        series = bucket_timeline(posts, granularity)
        payload: dict = {
            "granularity": granularity,
            "window": window,
            "z_threshold": z_threshold,
            "buckets": [
                {
                    "start": b.start.isoformat().replace("+00:00", "Z"),
                    "post_count": b.post_count,
                    "engagement": b.engagement,
                }
                for b in series.buckets
            ],
            "spikes": [],
        }
        try:
            spikes = detect_spikes(
                series, window=window, z_threshold=z_threshold,
                terms_by_bucket=bucket_terms(posts, granularity),
            )
        except AnalysisError as exc:
            payload["spike_note"] = exc.message
            return payload
        payload["spikes"] = [
            {
                "bucket_start": s.bucket_start.isoformat().replace("+00:00", "Z"),
                "z_score": s.z_score,
                "top_terms": s.top_terms,
            }
            for s in spikes
        ]
        return payload

    def _analyze_spatial(self, posts) -> dict:
        per_post = [extract_locations(p, self.gazetteer) for p in posts]
        regions = aggregate_regions(per_post, self.gazetteer)
        unresolved = sum(
            1 for ms in per_post for m in ms if m.source == "geotag" and m.region == "other"
        )
        return {
            "regions": [
                {"region": r, "post_count": c.post_count, "lat": c.lat, "lon": c.lon}
                for r, c in regions.items()
            ],
            "posts_with_location": sum(1 for ms in per_post if any(m.region != "other" for m in ms)),
            "unresolved_geotags": unresolved,
        }

    def _analyze_network(self, posts) -> dict:
        graph = net.build_graph(posts)
        payload: dict = {
            "damping": 0.85,
            "nodes": [],
            "edges": [
                {"source": e.src, "target": e.dst, "kind": e.kind, "weight": e.weight}
                for e in graph.edges
            ],
            "top_influencers": [],
        }
        if not graph.nodes:
            return payload
        metrics = net.centrality(graph)
        payload["nodes"] = [
            {
                "id": node,
                "in_degree": metrics[node].in_degree,
                "out_degree": metrics[node].out_degree,
                "pagerank": metrics[node].pagerank,
            }
            for node in graph.nodes
        ]
        payload["top_influencers"] = net.top_influencers(graph)
        return payload

    def _analyze_posts(self, posts) -> dict:
        lexicon = self.active_lexicon()
        patterns = builtin_patterns()
        records = []
        for p in posts:
            s = classify_sentiment(p, lexicon, threshold=self.config.sentiment_threshold)
            pr = classify_propaganda(p, patterns, threshold=self.config.propaganda_threshold)
            locations = extract_locations(p, self.gazetteer)
            records.extend(post_analysis(p, s, pr, locations))
        ranked = rank_by_degree(records)
        return {
            "lexicon_version": lexicon.version,
            "records": [
                {
                    "post_id": r.post_id,
                    "kind": r.kind,
                    "label": r.label,
                    "degree": r.degree,
                    "locations": r.locations,
                }
                for r in ranked
            ],
        }

    # -- feedback ------------------------------------------------------------

    def apply_dataset_feedback(self, dataset_id: str) -> dict:
        """Fold a dataset's sentiment annotations into a new lexicon version."""
        annotations = self.storage.list_annotations(dataset_id)
        posts = self.storage.get_posts(dataset_id)
        tokens_by_post = {p.id: p.tokens for p in posts}
        lexicon = self.active_lexicon()
        updated, report = apply_feedback(annotations, lexicon, tokens_by_post)
        if updated.version != lexicon.version:
            self.storage.put_lexicon("sentiment", updated.version, updated.to_dict(), lexicon.version)
        return {
            "previous_version": lexicon.version,
            "lexicon_version": updated.version,
            **report,
        }

    # -- sources --------------------------------------------------------------

    def search_source(
        self,
        source_id: str,
        query: str,
        limit: int = 50,
        credentials: Mapping[str, str] | None = None,
        save_as: str | None = None,
    ) -> dict:
        """Run a connector search; optionally stage results as a dataset.

        Search alone has no local side effects; ``save_as`` routes the
        records through the standard validation path and stores them.
        """
        source = self.registry.get(source_id)
        records = source.search(query, limit=limit, credentials=credentials)
        if save_as is None:
            return {
                "source_id": source_id,
                "count": len(records),
                "records": [r.fields for r in records],
            }
        posts, report = validate_records(records)
        dataset_id = None
        if posts:
            dataset_id = self.storage.put_dataset(posts, infer_metadata(posts), name=save_as)
        return {
            "source_id": source_id,
            "count": len(records),
            "dataset_id": dataset_id,
            "validation_report": report.to_dict(),
        }

    # -- export ---------------------------------------------------------------

    def export_job(self, job_id: str, format: str = "json") -> tuple[bytes, str, str]:
        """Render a finished job's report; returns (bytes, filename, mime).

        Reports carry only analysis content (kind, payload and the seed the
        job ran with), never run identifiers or timestamps, so re-running
        the same analysis exports byte-identical files.
        """
        job = self.queue.get(job_id)
        result = self.storage.get_result_by_job(job_id)
        if job.state != "done" or result is None:
            raise JobError("ILLEGAL_TRANSITION", f"job {job_id!r} has no exportable result (state={job.state})")
        if format == "json":
            doc = {"kind": result.kind, "payload": result.payload}
            body = json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
            return body.encode("utf-8"), f"{result.kind}-report.json", "application/json"
        if format == "csv":
            body = _result_to_csv(result.kind, result.payload)
            return body.encode("utf-8"), f"{result.kind}-report.csv", "text/csv"
        raise IngestError("UNKNOWN_FORMAT", f"unsupported export format {format!r}")


def _result_to_csv(kind: str, payload: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if kind == "sentiment":
        writer.writerow(["post_id", "label", "score", "degree"])
        for row in payload["posts"]:
            writer.writerow([row["post_id"], row["label"], row["score"], abs(row["score"])])
    elif kind == "propaganda":
        writer.writerow(["post_id", "flag", "score", "technique", "spans"])
        for row in payload["posts"]:
            spans = ";".join(f"{s}-{e}" for s, e in row["spans"])
            writer.writerow([row["post_id"], row["flag"], row["score"], row["technique"] or "", spans])
    elif kind == "subtopics":
        writer.writerow(["cluster_id", "doc_count", "rank", "term", "weight"])
        for cluster in payload["clusters"]:
            for rank, item in enumerate(cluster["top_terms"], start=1):
                writer.writerow([cluster["cluster_id"], cluster["doc_count"], rank, item["term"], item["weight"]])
    elif kind == "wordcloud":
        writer.writerow(["term", "count"])
        for item in payload["terms"]:
            writer.writerow([item["term"], item["count"]])
    elif kind == "trends":
        spike_starts = {s["bucket_start"] for s in payload.get("spikes", [])}
        writer.writerow(["bucket_start", "post_count", "engagement", "spike"])
        for b in payload["buckets"]:
            writer.writerow([b["start"], b["post_count"], b["engagement"], b["start"] in spike_starts])
    elif kind == "spatial":
        writer.writerow(["region", "post_count", "lat", "lon"])
        for r in payload["regions"]:
            writer.writerow([r["region"], r["post_count"], r["lat"], r["lon"]])
    elif kind == "network":
        writer.writerow(["node", "pagerank", "in_degree", "out_degree"])
        for nrow in payload["nodes"]:
            writer.writerow([nrow["id"], nrow["pagerank"], nrow["in_degree"], nrow["out_degree"]])
    elif kind == "post_analysis":
        writer.writerow(["post_id", "kind", "label", "degree", "locations"])
        for r in payload["records"]:
            writer.writerow([r["post_id"], r["kind"], r["label"], r["degree"], ";".join(r["locations"])])
    else:
        raise IngestError("UNKNOWN_FORMAT", f"no CSV projection for kind {kind!r}")
    return buf.getvalue()
