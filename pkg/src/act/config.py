"""Service configuration: a TOML file with server, paths, pipeline,
media, and track sections. Paths are resolved relative to the config
file; omitted resource paths fall back to the shipped defaults.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from act.ingest import DEFAULT_KEYWORDS, TrackConfig
from act.media import MediaWeights


@dataclass(frozen=True)
class ConfigIssue:
    """One actionable problem with a config, tied to a dotted field name."""

    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


class ConfigError(Exception):
    """Raised when a config file cannot be loaded; carries issues."""

    def __init__(self, issues: list[ConfigIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


@dataclass(frozen=True)
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8040
    cors_origin: str = "*"


@dataclass(frozen=True)
class PathsConfig:
    """Input files and the optional store directory.

    ``None`` for a resource means the packaged default is used; the
    corpus and media corpus have no defaults and stay optional until the
    CLI provides them.
    """

    corpus: Path | None = None
    media_corpus: Path | None = None
    gazetteer: Path | None = None
    sentiment_lexicon: Path | None = None
    anger_terms: Path | None = None
    noise_rules: Path | None = None
    category_rules: Path | None = None
    store_dir: Path | None = None


@dataclass(frozen=True)
class PipelineParams:
    theta: float = 0.5
    window_hours: float = 6.0
    snapshot_batch: int = 50
    anger_threshold: float = 0.2


@dataclass(frozen=True)
class MediaParams:
    weights: MediaWeights = MediaWeights()
    k: int = 12


@dataclass(frozen=True)
class ApiConfig:
    server: ServerConfig = ServerConfig()
    paths: PathsConfig = PathsConfig()
    pipeline: PipelineParams = PipelineParams()
    media: MediaParams = MediaParams()
    track: TrackConfig = TrackConfig(accounts=frozenset(), keywords=DEFAULT_KEYWORDS)


_SECTIONS = {
    "server": {"host", "port", "cors_origin"},
    "paths": {
        "corpus",
        "media_corpus",
        "gazetteer",
        "sentiment_lexicon",
        "anger_terms",
        "noise_rules",
        "category_rules",
        "store_dir",
    },
    "pipeline": {"theta", "window_hours", "snapshot_batch", "anger_threshold"},
    "media": {"content_weight", "geo_weight", "time_weight", "score_cutoff", "k"},
    "track": {"accounts", "keywords", "replay_speed"},
}


def _path_or_none(base: Path, value: object, dotted: str, issues: list[ConfigIssue]) -> Path | None:
    if value is None:
        return None
    if not isinstance(value, str):
        issues.append(ConfigIssue(dotted, f"expected a path string, got {type(value).__name__}"))
        return None
    p = Path(value)
    return p if p.is_absolute() else (base / p)


def load_config(path: str | Path) -> ApiConfig:
    """Parse and structurally validate a TOML config file.

    Raises :class:`ConfigError` listing every problem found. Use
    :func:`validate_config` afterwards for existence and range checks.
    """
    config_path = Path(path)
    issues: list[ConfigIssue] = []
    try:
        with config_path.open("rb") as handle:
            data = tomllib.load(handle)
    except OSError as exc:
        raise ConfigError([ConfigIssue("config", f"cannot read {config_path}: {exc}")]) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([ConfigIssue("config", f"invalid TOML: {exc}")]) from exc

    for section, keys in data.items():
        if section not in _SECTIONS:
            issues.append(ConfigIssue(section, "unknown section"))
            continue
        if not isinstance(keys, dict):
            issues.append(ConfigIssue(section, "expected a table"))
            continue
        for key in keys:
            if key not in _SECTIONS[section]:
                issues.append(ConfigIssue(f"{section}.{key}", "unknown key"))

    base = config_path.resolve().parent
    server_data = data.get("server", {})
    server = ServerConfig(
        host=str(server_data.get("host", ServerConfig.host)),
        port=int(server_data.get("port", ServerConfig.port)),
        cors_origin=str(server_data.get("cors_origin", ServerConfig.cors_origin)),
    )

    paths_data = data.get("paths", {})
    paths = PathsConfig(
        corpus=_path_or_none(base, paths_data.get("corpus"), "paths.corpus", issues),
        media_corpus=_path_or_none(base, paths_data.get("media_corpus"), "paths.media_corpus", issues),
        gazetteer=_path_or_none(base, paths_data.get("gazetteer"), "paths.gazetteer", issues),
        sentiment_lexicon=_path_or_none(
            base, paths_data.get("sentiment_lexicon"), "paths.sentiment_lexicon", issues
        ),
        anger_terms=_path_or_none(base, paths_data.get("anger_terms"), "paths.anger_terms", issues),
        noise_rules=_path_or_none(base, paths_data.get("noise_rules"), "paths.noise_rules", issues),
        category_rules=_path_or_none(
            base, paths_data.get("category_rules"), "paths.category_rules", issues
        ),
        store_dir=_path_or_none(base, paths_data.get("store_dir"), "paths.store_dir", issues),
    )

    pipe_data = data.get("pipeline", {})
    try:
        pipeline = PipelineParams(
            theta=float(pipe_data.get("theta", PipelineParams.theta)),
            window_hours=float(pipe_data.get("window_hours", PipelineParams.window_hours)),
            snapshot_batch=int(pipe_data.get("snapshot_batch", PipelineParams.snapshot_batch)),
            anger_threshold=float(pipe_data.get("anger_threshold", PipelineParams.anger_threshold)),
        )
    except (TypeError, ValueError) as exc:
        issues.append(ConfigIssue("pipeline", f"bad value: {exc}"))
        pipeline = PipelineParams()

    media_data = data.get("media", {})
    try:
        defaults = MediaWeights()
        media = MediaParams(
            weights=MediaWeights(
                content=float(media_data.get("content_weight", defaults.content)),
                geo=float(media_data.get("geo_weight", defaults.geo)),
                time=float(media_data.get("time_weight", defaults.time)),
                cutoff=float(media_data.get("score_cutoff", defaults.cutoff)),
            ),
            k=int(media_data.get("k", MediaParams.k)),
        )
    except (TypeError, ValueError) as exc:
        issues.append(ConfigIssue("media", f"bad value: {exc}"))
        media = MediaParams()

    track_data = data.get("track", {})
    accounts = track_data.get("accounts", [])
    keywords = track_data.get("keywords", sorted(DEFAULT_KEYWORDS))
    if not isinstance(accounts, list) or not all(isinstance(a, str) for a in accounts):
        issues.append(ConfigIssue("track.accounts", "expected a list of strings"))
        accounts = []
    if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
        issues.append(ConfigIssue("track.keywords", "expected a list of strings"))
        keywords = sorted(DEFAULT_KEYWORDS)
    try:
        track = TrackConfig(
            accounts=frozenset(accounts),
            keywords=frozenset(k.lower() for k in keywords),
            replay_speed=float(track_data.get("replay_speed", 0.0)),
        )
    except ValueError as exc:
        issues.append(ConfigIssue("track", str(exc)))
        track = TrackConfig()

    if issues:
        raise ConfigError(issues)
    return ApiConfig(server=server, paths=paths, pipeline=pipeline, media=media, track=track)


def validate_config(cfg: ApiConfig) -> list[ConfigIssue]:
    """Existence and range checks; returns an issue per problem found."""
    issues: list[ConfigIssue] = []
    if not (1 <= cfg.server.port <= 65535):
        issues.append(ConfigIssue("server.port", f"must be in [1, 65535], got {cfg.server.port}"))
    for name in (
        "corpus",
        "media_corpus",
        "gazetteer",
        "sentiment_lexicon",
        "anger_terms",
        "noise_rules",
        "category_rules",
    ):
        value: Path | None = getattr(cfg.paths, name)
        if value is not None and not value.is_file():
            issues.append(ConfigIssue(f"paths.{name}", f"file not found: {value}"))
    if not (0.0 <= cfg.pipeline.theta <= 1.0):
        issues.append(ConfigIssue("pipeline.theta", "must be in [0, 1]"))
    if cfg.pipeline.window_hours <= 0:
        issues.append(ConfigIssue("pipeline.window_hours", "must be positive"))
    if cfg.pipeline.snapshot_batch < 1:
        issues.append(ConfigIssue("pipeline.snapshot_batch", "must be >= 1"))
    if not (0.0 <= cfg.pipeline.anger_threshold <= 1.0):
        issues.append(ConfigIssue("pipeline.anger_threshold", "must be in [0, 1]"))
    for name in ("content", "geo", "time", "cutoff"):
        if getattr(cfg.media.weights, name) < 0:
            issues.append(ConfigIssue(f"media.{name}_weight", "must be >= 0"))
    if cfg.media.k < 1:
        issues.append(ConfigIssue("media.k", "must be >= 1"))
    return issues


def with_overrides(
    cfg: ApiConfig,
    corpus: Path | None = None,
    replay_speed: float | None = None,
) -> ApiConfig:
    """Copy of the config with CLI-level overrides applied."""
    paths = cfg.paths if corpus is None else replace(cfg.paths, corpus=corpus)
    track = cfg.track
    if replay_speed is not None:
        track = TrackConfig(
            accounts=track.accounts, keywords=track.keywords, replay_speed=replay_speed
        )
    return replace(cfg, paths=paths, track=track)
