"""Command-line driver: preprocess, serve, run, iterate, validate.

Exit codes: 0 success, 1 input/config validation failure, 2 runtime failure.
Errors go to stderr as single machine-parsable lines of the form
``error: <stage>: <message>``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .cluster import ClusterError
from .corpus import Corpus, CorpusError, load_entities, load_extractions, load_reviews, load_schema
from .pipeline import (
    FEATURIZER_EXTRACTIONS,
    ConfigError,
    PipelineError,
    iterate as run_iterate,
    load_config,
    preprocess as run_preprocess,
)
from .querylang import QueryParseError, replay, parse
from .lda import TopicModelError
from .snapshot import ALL_ENTITIES, Snapshot
from .store import StoreError
from .summarize import SummaryError

EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

_VALIDATION_ERRORS = (
    ConfigError,
    CorpusError,
    QueryParseError,
    ClusterError,
    SummaryError,
    TopicModelError,
)


def _fail(stage: str, exc: BaseException) -> None:
    if isinstance(exc, PipelineError):
        stage, exc = exc.stage, exc.original
    click.echo(f"error: {stage}: {exc}", err=True)
    code = EXIT_VALIDATION if isinstance(exc, _VALIDATION_ERRORS) else EXIT_RUNTIME
    sys.exit(code)


@click.group()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Pipeline config file (flat key=value lines).",
)
@click.pass_context
def main(ctx: click.Context, config_path: Path) -> None:
    """Review exploration pipeline and server."""
    ctx.ensure_object(dict)
    ctx.obj["config_path"] = config_path


def _set_option(fn):
    return click.option(
        "--set",
        "sets",
        multiple=True,
        metavar="KEY=VALUE",
        help="Override any config key (repeatable).",
    )(fn)


def _load_config(ctx: click.Context, overrides: dict | None = None, sets: tuple[str, ...] = ()):
    merged: dict = {}
    for pair in sets:
        if "=" not in pair:
            _fail("config", ConfigError(f"--set expects KEY=VALUE, got {pair!r}"))
        key, value = pair.split("=", 1)
        merged[key.strip()] = value.strip()
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return load_config(ctx.obj["config_path"], merged)
    except ConfigError as exc:
        _fail("config", exc)


@main.command()
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--index-dir", type=click.Path(path_type=Path), default=None)
@_set_option
@click.pass_context
def preprocess(ctx: click.Context, seed: int | None, index_dir: Path | None,
               sets: tuple[str, ...]) -> None:
    """Featurize, cluster, summarize, and write a new index version."""
    config = _load_config(ctx, {"seed": seed, "index_dir": index_dir}, sets)
    try:
        target = run_preprocess(config)
    except (PipelineError, ConfigError, StoreError) as exc:
        _fail("preprocess", exc)
        return
    click.echo(str(target))


@main.command()
@click.option("--index-dir", type=click.Path(path_type=Path), default=None,
              envvar="REVIEWSCOPE_INDEX_DIR", help="Index directory (defaults to the config's).")
@click.option("--host", default="127.0.0.1", envvar="REVIEWSCOPE_HOST", show_default=True)
@click.option("--port", default=8000, type=int, envvar="REVIEWSCOPE_PORT", show_default=True)
@_set_option
@click.pass_context
def serve(ctx: click.Context, index_dir: Path | None, host: str, port: int,
          sets: tuple[str, ...]) -> None:
    """Serve the HTTP API over the preprocessed index."""
    import uvicorn

    from .service import build_app

    config = _load_config(ctx, sets=sets)
    target = index_dir if index_dir is not None else config.index_dir
    try:
        snap = Snapshot.open(target)
    except (StoreError, CorpusError) as exc:
        _fail("serve", exc)
        return
    click.echo(f"serving index {snap.index_dir} on http://{host}:{port}", err=True)
    uvicorn.run(build_app(snap), host=host, port=port, log_level="warning")


@main.command()
@click.argument("command_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--entity", default=ALL_ENTITIES, show_default=True)
@click.option("--path", "cluster_path", default="", help="Dot path of the scope cluster.")
@click.option("--index-dir", type=click.Path(path_type=Path), default=None)
@_set_option
@click.pass_context
def run(ctx: click.Context, command_file: Path, entity: str, cluster_path: str,
        index_dir: Path | None, sets: tuple[str, ...]) -> None:
    """Replay a newline-separated command script and print review ids.

    Output is one JSON object per matching review, in result order.
    """
    config = _load_config(ctx, sets=sets)
    target = index_dir if index_dir is not None else config.index_dir
    try:
        snap = Snapshot.open(target)
    except (StoreError, CorpusError) as exc:
        _fail("run", exc)
        return

    commands = []
    for line_no, line in enumerate(command_file.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            commands.append(parse(stripped, snap.attributes))
        except QueryParseError as exc:
            _fail("run", QueryParseError(f"line {line_no}: {exc}", exc.position))
            return

    try:
        scope = snap.scope_ids(entity, _parse_path(cluster_path))
    except StoreError as exc:
        _fail("run", exc)
        return
    if scope is None:
        _fail("run", StoreError(f"unknown scope entity={entity!r} path={cluster_path!r}"))
        return
    session = replay(scope, commands, snap)
    for rid in session.working_ids:
        click.echo(json.dumps({"id": rid}))


def _parse_path(text: str):
    from .store import str_to_path

    return str_to_path(text)


@main.command()
@click.argument("new_schema", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--extractions", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="Extraction records matching the new schema.")
@_set_option
@click.pass_context
def iterate(ctx: click.Context, new_schema: Path, extractions: Path | None,
            sets: tuple[str, ...]) -> None:
    """Rebuild the index under the next version with a revised schema."""
    config = _load_config(ctx, sets=sets)
    try:
        target = run_iterate(config, new_schema, extractions)
    except (PipelineError, ConfigError, StoreError) as exc:
        _fail("iterate", exc)
        return
    click.echo(str(target))


@main.command()
@_set_option
@click.pass_context
def validate(ctx: click.Context, sets: tuple[str, ...]) -> None:
    """Check config and input files without writing anything."""
    config = _load_config(ctx, sets=sets)
    try:
        config.validate()
        reviews = load_reviews(config.reviews)
        entities = load_entities(config.entities) if config.entities else None
        corpus = Corpus.build(reviews, entities)
        click.echo(f"reviews: {len(corpus)}")
        click.echo(f"entities: {len(corpus.entities)}")
        if config.featurizer == FEATURIZER_EXTRACTIONS:
            schema = load_schema(config.schema)
            records = load_extractions(config.extractions, schema, corpus)
            click.echo(f"schema attributes: {len(schema.attributes)}")
            click.echo(f"extraction records: {len(records)}")
        click.echo("ok")
    except (ConfigError, CorpusError) as exc:
        _fail("validate", exc)


if __name__ == "__main__":
    main()
