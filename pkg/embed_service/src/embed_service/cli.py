"""Command-line entry points: serve the sidecar, export fixture stores."""

import click
import uvicorn

from embed_service.app import create_app
from embed_service.encoders import (
    SERVICE_MODELS,
    ModelLoadError,
    UnknownModelError,
    hash_encoder_factory,
    real_encoder_factory,
)
from embed_service.export import export_fixtures

_FACTORIES = {"real": real_encoder_factory, "hash": hash_encoder_factory}


@click.group()
def cli() -> None:
    """Embedding sidecar for the vuldat remote backend."""


def _encoder_option():
    return click.option(
        "--encoder",
        type=click.Choice(sorted(_FACTORIES)),
        default="real",
        show_default=True,
        help="'hash' serves deterministic stand-in vectors for offline smoke tests.",
    )


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8876, show_default=True)
@_encoder_option()
def serve(host: str, port: int, encoder: str) -> None:
    """Run the HTTP service."""
    uvicorn.run(create_app(_FACTORIES[encoder]), host=host, port=port)


@cli.command("export-fixtures")
@click.option("--model", "model_name", required=True, help="Registry model name.")
@click.option("--texts", "texts_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="JSONL file of {id, text} records.")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Store base path; writes <out>.embjson and <out>.embbin.")
@click.option("--mode", type=click.Choice(["partial", "full"]), default="full",
              show_default=True, help="Preprocess mode recorded in the store header.")
@_encoder_option()
def export_fixtures_command(
    model_name: str, texts_path: str, out_path: str, mode: str, encoder: str
) -> None:
    """Embed a texts file into the vuldat fixture store format."""
    try:
        json_path, bin_path = export_fixtures(
            model_name, texts_path, out_path,
            mode=mode, encoder_factory=_FACTORIES[encoder],
        )
    except (ValueError, UnknownModelError, ModelLoadError, OSError) as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"wrote {json_path} and {bin_path}")


@cli.command()
def models() -> None:
    """List the served models."""
    for spec in SERVICE_MODELS:
        click.echo(f"{spec.model_name:40s} {spec.dimension:4d} ~{spec.size_hint_mb} MB")


def main() -> None:
    cli(prog_name="embed-service")
