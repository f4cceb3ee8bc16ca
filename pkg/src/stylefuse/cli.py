"""Operator CLI: ingest validation, embedding import, one-off queries,
benchmark evaluation, the ablation grid, and service startup.

Exit codes: 0 success, 1 validation failure, 2 runtime failure,
3 dependency unavailable. Errors go to stderr; data goes to stdout.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from stylefuse.config import (
    EngineConfig,
    build_runtime,
    catalog_paths_from_dir,
    load_config,
)
from stylefuse.datastore.aemb import read_embeddings, write_embeddings
from stylefuse.datastore.catalog import load_catalog
from stylefuse.datastore.manifest import (
    load_a100_questions,
    load_cir_queries,
    load_fitb_questions,
    load_manifest,
)
from stylefuse.errors import ConfigError, EngineError
from stylefuse.evaluation.harness import (
    DEFAULT_RECALL_KS,
    eval_a100,
    eval_cir,
    eval_fitb,
    run_ablation,
    standard_grid,
)
from stylefuse.pipeline import run_recommend
from stylefuse.reasoning.records import TaskInput


@click.group()
def cli() -> None:
    """Outfit-completion engine."""


def _engine_config(config_path: str | None, catalog_dir: str | None,
                   cache_dir: str | None, replay: bool) -> EngineConfig:
    config = load_config(config_path)
    if catalog_dir is not None:
        manifest, embeddings = catalog_paths_from_dir(catalog_dir)
        config.manifest_path = str(manifest)
        config.embedding_path = str(embeddings)
        if cache_dir is None and config.cache_dir == "cache":
            # Default the cache next to an explicitly chosen catalog so
            # bundled fixtures replay without a config file.
            config.cache_dir = str(Path(catalog_dir) / "cache")
    if cache_dir is not None:
        config.cache_dir = cache_dir
    if replay:
        config.mode = "replay"
    config.pipeline.replay = config.replay
    return config


config_option = click.option("--config", "config_path", type=str, default=None,
                             help="Engine config file (JSON).")
replay_option = click.option("--replay", is_flag=True, default=False,
                             help="Require every reasoning call to hit the transcript cache.")
catalog_option = click.option("--catalog", "catalog_dir", type=str, default=None,
                              help="Catalog directory (manifest.jsonl + embeddings.aemb).")
cache_option = click.option("--cache-dir", type=str, default=None,
                            help="Transcript cache directory.")


# --- ingest ----------------------------------------------------------------

@cli.group()
def ingest() -> None:
    """Validate data files."""


@ingest.command("validate")
@click.option("--manifest", type=str, default=None, help="Item manifest (JSONL).")
@click.option("--embeddings", type=str, default=None, help="Embedding file (AEMB).")
@click.option("--fitb", type=str, default=None, help="FITB question set (JSONL).")
@click.option("--cir", type=str, default=None, help="CIR query set (JSONL).")
@click.option("--a100", type=str, default=None, help="Aesthetic-test question set (JSONL).")
def ingest_validate(manifest, embeddings, fitb, cir, a100) -> None:
    """Validate any subset of data files; exit 1 on the first violation."""
    checked = 0
    if manifest is not None:
        entries = load_manifest(manifest)
        click.echo(f"manifest ok: {len(entries)} items")
        checked += 1
    if embeddings is not None:
        dim, records = read_embeddings(embeddings)
        click.echo(f"embeddings ok: {len(records)} vectors, dim {dim}")
        checked += 1
    if manifest is not None and embeddings is not None:
        catalog = load_catalog(manifest, embeddings)
        for warning in catalog.load_warnings:
            click.echo(f"warning: {warning}", err=True)
        click.echo(f"catalog ok: {len(catalog)} items joined")
    if fitb is not None:
        click.echo(f"fitb ok: {len(load_fitb_questions(fitb))} questions")
        checked += 1
    if cir is not None:
        click.echo(f"cir ok: {len(load_cir_queries(cir))} queries")
        checked += 1
    if a100 is not None:
        click.echo(f"a100 ok: {len(load_a100_questions(a100))} questions")
        checked += 1
    if checked == 0:
        raise click.UsageError("nothing to validate; pass at least one file option")


# --- embed import ----------------------------------------------------------

@cli.group()
def embed() -> None:
    """Embedding file tooling."""


@embed.command("import")
@click.option("--input", "input_path", type=str, required=True,
              help="JSONL with {item_id, values} records.")
@click.option("--output", "output_path", type=str, required=True,
              help="Destination AEMB file.")
def embed_import(input_path: str, output_path: str) -> None:
    """Convert line-delimited JSON vectors into the binary AEMB format."""
    records = []
    with open(input_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            records.append((str(obj["item_id"]), obj["values"]))
    count = write_embeddings(records, output_path)
    click.echo(f"wrote {count} vectors to {output_path}")


# --- reason / query --------------------------------------------------------

@cli.command()
@config_option
@replay_option
@catalog_option
@cache_option
@click.option("--outfit", required=True, help="Comma-separated outfit item ids.")
@click.option("--category", default=None, help="Target category (category mode).")
@click.option("--candidates", default=None, help="Comma-separated candidate item ids (FITB mode).")
def reason(config_path, replay, catalog_dir, cache_dir, outfit, category, candidates) -> None:
    """Run the reasoning step for one query and print the record."""
    if (category is None) == (candidates is None):
        raise click.UsageError("pass exactly one of --category / --candidates")
    config = _engine_config(config_path, catalog_dir, cache_dir, replay)
    runtime = build_runtime(config)
    outfit_ids = [s for s in outfit.split(",") if s]
    if category is not None:
        task = TaskInput(target_category=category)
    else:
        ids = [s for s in candidates.split(",") if s]
        refs = tuple(
            str(runtime.catalog.image_path(runtime.catalog.item(i))) for i in ids
        )
        task = TaskInput(candidate_image_refs=refs)
    from stylefuse.pipeline import reason_for

    record = reason_for(runtime, outfit_ids, task, config.pipeline)
    click.echo(record.to_json())


@cli.command()
@config_option
@replay_option
@catalog_option
@cache_option
@click.option("--outfit", required=True, help="Comma-separated outfit item ids.")
@click.option("--category", required=True, help="Target category.")
@click.option("-k", type=int, default=10, show_default=True, help="Results to return.")
def query(config_path, replay, catalog_dir, cache_dir, outfit, category, k) -> None:
    """Complete an outfit once; print the ranking and the explanation."""
    config = _engine_config(config_path, catalog_dir, cache_dir, replay)
    runtime = build_runtime(config)
    outfit_ids = [s for s in outfit.split(",") if s]
    ranking, outcome = run_recommend(runtime, outfit_ids, category, k, config.pipeline)
    out = {
        "ranking": [{"item_id": i, "score": s} for i, s in ranking.entries],
        "explanation": {
            "target_description": outcome.record.target_description,
            "attributes": outcome.record.profile.to_obj(),
        },
        "diagnostics": outcome.query.diagnostics.to_obj(),
    }
    click.echo(json.dumps(out, indent=1, sort_keys=True, ensure_ascii=False))


# --- eval ------------------------------------------------------------------

@cli.group("eval")
def eval_group() -> None:
    """Benchmark runners."""


def _eval_common(config_path, catalog_dir, cache_dir, replay, parallelism):
    config = _engine_config(config_path, catalog_dir, cache_dir, replay)
    runtime = build_runtime(config)
    return config, runtime, max(parallelism, 1)


def _emit_report(report, out_path: str | None) -> None:
    if out_path is not None:
        lines = [report.to_json()] + report.question_lines()
        Path(out_path).write_text("\n".join(lines) + "\n", encoding="utf-8")


parallelism_option = click.option("--parallelism", type=int, default=1, show_default=True,
                                  help="Question-level worker threads.")
out_option = click.option("--out", "out_path", type=str, default=None,
                          help="Write machine-readable records (JSONL) here.")


@eval_group.command("fitb")
@config_option
@replay_option
@catalog_option
@cache_option
@parallelism_option
@out_option
@click.option("--questions", required=True, help="FITB question set (JSONL).")
def eval_fitb_cmd(config_path, replay, catalog_dir, cache_dir, parallelism,
                  out_path, questions) -> None:
    """Evaluate candidate-set completion accuracy."""
    config, runtime, workers = _eval_common(
        config_path, catalog_dir, cache_dir, replay, parallelism
    )
    report = eval_fitb(load_fitb_questions(questions), runtime, config.pipeline,
                       parallelism=workers)
    click.echo(f"questions: {len(report.questions)}")
    click.echo(f"accuracy: {report.fitb_accuracy:.3f}")
    _emit_report(report, out_path)


@eval_group.command("cir")
@config_option
@replay_option
@catalog_option
@cache_option
@parallelism_option
@out_option
@click.option("--questions", required=True, help="CIR query set (JSONL).")
@click.option("--ks", default=",".join(str(k) for k in DEFAULT_RECALL_KS),
              show_default=True, help="Comma-separated recall cutoffs.")
def eval_cir_cmd(config_path, replay, catalog_dir, cache_dir, parallelism,
                 out_path, questions, ks) -> None:
    """Evaluate category-constrained retrieval recall."""
    config, runtime, workers = _eval_common(
        config_path, catalog_dir, cache_dir, replay, parallelism
    )
    cutoffs = [int(s) for s in ks.split(",") if s]
    report = eval_cir(load_cir_queries(questions), runtime, config.pipeline,
                      ks=cutoffs, parallelism=workers)
    click.echo(f"queries: {len(report.questions)}")
    for k in sorted(report.recall_at):
        click.echo(f"recall@{k}: {report.recall_at[k]:.3f}")
    _emit_report(report, out_path)


@eval_group.command("a100")
@config_option
@replay_option
@catalog_option
@cache_option
@parallelism_option
@out_option
@click.option("--questions", required=True, help="Aesthetic-test question set (JSONL).")
def eval_a100_cmd(config_path, replay, catalog_dir, cache_dir, parallelism,
                  out_path, questions) -> None:
    """Evaluate the aesthetic tests (hard/soft crowd + per-attribute expert)."""
    config, runtime, workers = _eval_common(
        config_path, catalog_dir, cache_dir, replay, parallelism
    )
    report = eval_a100(load_a100_questions(questions), runtime, config.pipeline,
                       parallelism=workers)
    for name in ("lat_hard", "lat_soft", "aat_total"):
        value = getattr(report, name)
        if value is not None:
            click.echo(f"{name}: {value:.4f}")
    if report.aat_per_attribute:
        for attribute, value in sorted(report.aat_per_attribute.items()):
            click.echo(f"aat[{attribute}]: {value:.4f}")
    _emit_report(report, out_path)


@cli.command()
@config_option
@replay_option
@catalog_option
@cache_option
@parallelism_option
@out_option
@click.option("--fitb", "fitb_path", default=None, help="FITB question set (JSONL).")
@click.option("--cir", "cir_path", default=None, help="CIR query set (JSONL).")
@click.option("--a100", "a100_path", default=None, help="Aesthetic-test set (JSONL).")
def ablate(config_path, replay, catalog_dir, cache_dir, parallelism, out_path,
           fitb_path, cir_path, a100_path) -> None:
    """Run the four-row component-removal grid and print the comparison table."""
    if fitb_path is None and cir_path is None and a100_path is None:
        raise click.UsageError("pass at least one of --fitb / --cir / --a100")
    config, runtime, workers = _eval_common(
        config_path, catalog_dir, cache_dir, replay, parallelism
    )
    datasets: dict = {}
    if fitb_path:
        datasets["fitb"] = load_fitb_questions(fitb_path)
    if cir_path:
        datasets["cir"] = load_cir_queries(cir_path)
    if a100_path:
        datasets["a100"] = load_a100_questions(a100_path)
    result = run_ablation(standard_grid(config.pipeline), datasets, runtime,
                          parallelism=workers)
    click.echo(result.format_table())
    if out_path is not None:
        Path(out_path).write_text(result.to_jsonl(), encoding="utf-8")


# --- serve -----------------------------------------------------------------

@cli.command()
@config_option
@replay_option
@catalog_option
@cache_option
@click.option("--host", default=None, help="Bind address (overrides config).")
@click.option("--port", type=int, default=None, help="Bind port (overrides config).")
def serve(config_path, replay, catalog_dir, cache_dir, host, port) -> None:
    """Start the HTTP service."""
    if config_path is None and catalog_dir is None:
        raise ConfigError("serve needs --config or --catalog")
    config = _engine_config(config_path, catalog_dir, cache_dir, replay)
    from stylefuse.service.app import create_app_from_config

    app = create_app_from_config(config)  # loads the catalog before binding
    import uvicorn

    uvicorn.run(
        app,
        host=host if host is not None else config.service.host,
        port=port if port is not None else config.service.port,
        log_level="info",
    )


def main(argv: list[str] | None = None) -> int:
    """Entry point mapping errors onto the exit-code contract."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except EngineError as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.exit_code
    except click.Abort:
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
