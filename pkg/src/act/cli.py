"""Command line entry points: serve, replay, validate-config.

The CLI stays thin: it loads configuration, wires the runtime, and hands
off to the pipeline and the HTTP app. ``ACT_CONFIG`` is the fallback for
--config everywhere.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from act.config import ApiConfig, ConfigError, load_config, validate_config, with_overrides
from act.ingest import open_stream
from act.service import PipelineRunner, ServiceRuntime, create_app
from act.views import export_payload


def _load(config_path: str | None) -> ApiConfig:
    """Resolve --config / ACT_CONFIG / built-in defaults, or exit 1."""
    if config_path is None:
        return ApiConfig()
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        for issue in exc.issues:
            click.echo(f"config error: {issue}", err=True)
        sys.exit(1)
    issues = validate_config(cfg)
    if issues:
        for issue in issues:
            click.echo(f"config error: {issue}", err=True)
        sys.exit(1)
    return cfg


_CONFIG_OPTION = click.option(
    "--config",
    "config_path",
    envvar="ACT_CONFIG",
    type=click.Path(exists=False, dir_okay=False),
    default=None,
    help="TOML config file (falls back to $ACT_CONFIG, then built-in defaults).",
)


@click.group()
def main() -> None:
    """Social-media analytics pipeline and API for emergency operations."""


@main.command()
@_CONFIG_OPTION
def serve(config_path: str | None) -> None:
    """Run the pipeline over the configured corpus and serve the API."""
    import uvicorn

    cfg = _load(config_path)
    if cfg.paths.corpus is None:
        click.echo("config error: paths.corpus: required for serve", err=True)
        sys.exit(1)
    runtime = ServiceRuntime.build(cfg)
    runner = PipelineRunner(runtime, cfg.paths.corpus)
    runner.start()
    app = create_app(runtime)
    uvicorn.run(app, host=cfg.server.host, port=cfg.server.port, log_level="info")


@main.command()
@_CONFIG_OPTION
@click.option("--input", "input_path", required=True, type=click.Path(dir_okay=False), help="Corpus to replay (JSON Lines).")
@click.option("--speed", type=float, default=0.0, show_default=True, help="Replay pacing multiplier; 0 replays as fast as possible.")
@click.option("--no-serve", is_flag=True, default=False, help="Batch mode: ingest everything, print the event summary export, exit.")
def replay(config_path: str | None, input_path: str, speed: float, no_serve: bool) -> None:
    """Replay a corpus through the pipeline, then serve or export."""
    cfg = with_overrides(_load(config_path), corpus=Path(input_path), replay_speed=speed)
    runtime = ServiceRuntime.build(cfg)

    if no_serve:
        stream = open_stream(cfg.paths.corpus, cfg.track, stats=runtime.stream_stats)
        snapshot = runtime.pipeline.run(stream)
        payload = export_payload(snapshot)
        click.echo(json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False))
        return

    import uvicorn

    runner = PipelineRunner(runtime, cfg.paths.corpus)
    runner.start()
    app = create_app(runtime)
    uvicorn.run(app, host=cfg.server.host, port=cfg.server.port, log_level="info")


@main.command("validate-config")
@_CONFIG_OPTION
def validate_config_cmd(config_path: str | None) -> None:
    """Check a config file; exits 0 when usable, 1 with diagnostics otherwise."""
    if config_path is None:
        click.echo("config error: config: no config file given (use --config or $ACT_CONFIG)", err=True)
        sys.exit(1)
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        for issue in exc.issues:
            click.echo(f"config error: {issue}", err=True)
        sys.exit(1)
    issues = validate_config(cfg)
    if issues:
        for issue in issues:
            click.echo(f"config error: {issue}", err=True)
        sys.exit(1)
    click.echo(f"config ok: {config_path}")


if __name__ == "__main__":
    main()
