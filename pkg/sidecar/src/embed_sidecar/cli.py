"""Sidecar CLI: offline export and the online embedding service."""

from __future__ import annotations

import sys

import click

from embed_sidecar.encoders import load_encoder
from embed_sidecar.export import export_catalog


@click.group()
def cli() -> None:
    """Embedding sidecar for the outfit-completion engine."""


@cli.command()
@click.option("--manifest", required=True, help="Item manifest (JSONL).")
@click.option("--images", "image_root", required=True,
              help="Directory image_refs are relative to.")
@click.option("--output", required=True, help="Destination image-embedding AEMB.")
@click.option("--texts-output", default=None,
              help="Optional destination for description embeddings (AEMB).")
@click.option("--model", default="hash:512", show_default=True,
              help="Encoder spec: hash:<dim> or clip:<model-name>.")
@click.option("--report", "report_path", default=None,
              help="Write the per-item failure report (JSON) here.")
def export(manifest, image_root, output, texts_output, model, report_path) -> None:
    """Embed a catalog's images (and optionally texts) into AEMB files."""
    encoder = load_encoder(model)
    report = export_catalog(image_root, manifest, output, encoder,
                            texts_output_path=texts_output)
    click.echo(f"exported {report.exported} vectors to {output}")
    for failure in report.failures:
        click.echo(f"failed {failure['item_id']}: {failure['reason']}", err=True)
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())


@cli.command()
@click.option("--port", type=int, default=8400, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--model", default="hash:512", show_default=True,
              help="Encoder spec: hash:<dim> or clip:<model-name>.")
def serve(port, host, model) -> None:
    """Start the embedding HTTP service."""
    import uvicorn

    from embed_sidecar.app import create_app

    encoder = load_encoder(model)
    uvicorn.run(create_app(encoder), host=host, port=port, log_level="info")


def main() -> int:
    try:
        cli.main(standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except (RuntimeError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
