"""Operator CLI over the same engine the HTTP API uses.

Machine-readable JSON goes to stdout, human-readable progress to stderr.
Exit codes: 0 success, 1 validation/domain failure, 2 internal error.
`analyze` runs jobs synchronously in-process; `serve` starts the HTTP API
with a background worker.
"""

from __future__ import annotations

import json
import sys
import traceback
from functools import wraps
from pathlib import Path

import click


def _out(doc) -> None:
    click.echo(json.dumps(doc, ensure_ascii=False, sort_keys=True))


def _note(msg: str) -> None:
    click.echo(msg, err=True)


def engine_command(fn):
    """Map engine errors onto exit codes, keeping stdout machine-readable."""

    @wraps(fn)
    def wrapper(*args, **kwargs):
        from .errors import MarsadError

        try:
            return fn(*args, **kwargs)
        except MarsadError as exc:
            _note(f"error: {exc.message}")
            _out({"error": exc.to_dict()})
            sys.exit(1)
        except click.ClickException:
            raise
        except Exception:
            traceback.print_exc()
            sys.exit(2)

    return wrapper


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Config file (defaults to $MARSAD_CONFIG).")
@click.option("--data-dir", type=click.Path(file_okay=False), default=None,
              help="Override the storage directory.")
@click.pass_context
def main(ctx, config_path, data_dir):
    """MARSAD social-media analytics engine."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path
    ctx.obj["data_dir"] = data_dir


def _build_engine(ctx):
    from .config import Config
    from .engine import Engine

    cfg = Config.load(ctx.obj.get("config_path"))
    if ctx.obj.get("data_dir"):
        cfg.data_dir = Path(ctx.obj["data_dir"])
    return Engine(cfg)


@main.command()
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["csv", "tsv", "json", "jsonl"]), required=True)
@click.option("--name", default="", help="Dataset display name.")
@click.option("--schema", "schema_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON schema file (required/optional/type_map).")
@click.pass_context
@engine_command
def ingest(ctx, file, fmt, name, schema_path):
    """Parse, validate and store a dataset file."""
    from .ingest import PostSchema

    engine = _build_engine(ctx)
    schema = None
    if schema_path:
        schema = PostSchema.from_dict(json.loads(Path(schema_path).read_text("utf-8")))
    data = Path(file).read_bytes()
    dataset_id, report = engine.ingest_bytes(data, fmt, name=name or Path(file).name, schema=schema)
    _note(f"accepted {report.accepted} of {report.total} rows")
    if dataset_id is None:
        _out({"error": {"code": "EMPTY_DATASET", "message": "no row passed validation"},
              "validation_report": report.to_dict()})
        sys.exit(1)
    _out({"dataset_id": dataset_id, "validation_report": report.to_dict()})


@main.command()
@click.argument("dataset_id")
@click.option("--kind", type=click.Choice([
    "subtopics", "wordcloud", "sentiment", "propaganda", "trends", "spatial", "network", "post_analysis",
]), required=True)
@click.option("--seed", type=int, default=None, help="Seed for seeded analyses.")
@click.option("--param", "params", multiple=True, metavar="KEY=VALUE",
              help="Extra analysis parameter (repeatable).")
@click.pass_context
@engine_command
def analyze(ctx, dataset_id, kind, seed, params):
    """Run one analysis synchronously; prints the payload (stable bytes for
    a fixed dataset and seed)."""
    engine = _build_engine(ctx)
    extra = {}
    for p in params:
        key, _, value = p.partition("=")
        extra[key] = value
    job_id, payload = engine.run_sync(dataset_id, kind, seed=seed, params=extra)
    _note(f"job_id: {job_id}")
    _out({"kind": kind, "payload": payload})


@main.command()
@click.argument("job_id")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.pass_context
@engine_command
def export(ctx, job_id, fmt, out_path):
    """Write a finished job's analysis report to a file."""
    engine = _build_engine(ctx)
    body, filename, _mime = engine.export_job(job_id, format=fmt)
    Path(out_path).write_bytes(body)
    _note(f"wrote {filename} ({len(body)} bytes) to {out_path}")
    _out({"path": out_path, "size": len(body)})


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--static-dir", type=click.Path(file_okay=False), default=None,
              help="Dashboard build directory served under /app.")
@click.pass_context
def serve(ctx, config_path, host, port, static_dir):
    """Start the HTTP API with a background analysis worker."""
    import uvicorn

    from .api import create_app
    from .config import Config
    from .engine import Engine

    cfg = Config.load(config_path or ctx.obj.get("config_path"))
    if ctx.obj.get("data_dir"):
        cfg.data_dir = Path(ctx.obj["data_dir"])
    if host:
        cfg.host = host
    if port:
        cfg.port = port
    engine = Engine(cfg)
    app = create_app(engine, cfg, start_worker=True, static_dir=static_dir)
    _note(f"serving on http://{cfg.host}:{cfg.port} (data_dir={cfg.data_dir})")
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")


@main.group()
def sources():
    """Online data sources."""


@sources.command("list")
@click.pass_context
@engine_command
def sources_list(ctx):
    engine = _build_engine(ctx)
    _out({"sources": [d.to_dict() for d in engine.registry.list_sources()]})


@sources.command("search")
@click.argument("source_id")
@click.option("--query", required=True)
@click.option("--limit", type=int, default=50)
@click.option("--credential", "credentials", multiple=True, metavar="KEY=VALUE",
              help="Credential for credentialed sources (repeatable).")
@click.option("--save-as", default=None, help="Stage results as a dataset with this name.")
@click.pass_context
@engine_command
def sources_search(ctx, source_id, query, limit, credentials, save_as):
    """Search a source; optionally save results as a dataset."""
    engine = _build_engine(ctx)
    creds = {}
    for c in credentials:
        key, _, value = c.partition("=")
        creds[key] = value
    outcome = engine.search_source(source_id, query, limit=limit,
                                   credentials=creds or None, save_as=save_as)
    _note(f"{outcome['count']} records from {source_id}")
    _out(outcome)


@main.group()
def feedback():
    """Annotation feedback."""


@feedback.command("apply")
@click.argument("dataset_id")
@click.pass_context
@engine_command
def feedback_apply(ctx, dataset_id):
    """Fold a dataset's sentiment annotations into the lexicon."""
    engine = _build_engine(ctx)
    outcome = engine.apply_dataset_feedback(dataset_id)
    _note(f"lexicon v{outcome['previous_version']} -> v{outcome['lexicon_version']}")
    _out(outcome)


if __name__ == "__main__":
    main()
