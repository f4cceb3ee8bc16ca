"""Engine configuration: JSON file, environment-variable overrides.

Sections: catalog paths, cache directory, mode (live/replay), the
reasoning endpoint, the embedder, pipeline defaults, and service
settings. Any leaf can be overridden with STYLEFUSE_<SECTION>_<KEY>
(for example STYLEFUSE_MLLM_ENDPOINT).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from stylefuse.datastore.catalog import Catalog, load_catalog
from stylefuse.embedder import HashingEmbedder, HttpEmbedder
from stylefuse.errors import ConfigError
from stylefuse.pipeline import EngineRuntime, PipelineConfig
from stylefuse.reasoning.cache import TranscriptCache
from stylefuse.reasoning.records import MllmConfig

ENV_PREFIX = "STYLEFUSE"


@dataclass
class ServiceSettings:
    host: str = "127.0.0.1"
    port: int = 8300
    ui_origin: str = ""
    request_timeout_s: float = 30.0
    parallelism: int = 4


@dataclass
class EngineConfig:
    manifest_path: str = ""
    embedding_path: str = ""
    cache_dir: str = "cache"
    mode: str = "replay"  # or "live"
    mllm: MllmConfig = field(default_factory=MllmConfig)
    embedder_kind: str = "hash"  # or "http"
    embedder_url: str = ""
    embedder_model: str = "hash-v1"
    embedder_dim: int = 0  # 0: follow the catalog dimension
    embedder_timeout_s: float = 30.0
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    service: ServiceSettings = field(default_factory=ServiceSettings)

    @property
    def replay(self) -> bool:
        return self.mode == "replay"


def _env(section: str, key: str) -> str | None:
    return os.environ.get(f"{ENV_PREFIX}_{section}_{key}".upper())


def _apply_env(config: EngineConfig) -> None:
    simple = {
        ("catalog", "manifest"): ("manifest_path", str),
        ("catalog", "embeddings"): ("embedding_path", str),
        ("cache", "dir"): ("cache_dir", str),
        ("engine", "mode"): ("mode", str),
        ("embedder", "kind"): ("embedder_kind", str),
        ("embedder", "url"): ("embedder_url", str),
        ("embedder", "model"): ("embedder_model", str),
        ("embedder", "dim"): ("embedder_dim", int),
    }
    for (section, key), (attr, cast) in simple.items():
        value = _env(section, key)
        if value is not None:
            setattr(config, attr, cast(value))
    for key, cast in (("endpoint", str), ("model", str), ("temperature", float),
                      ("timeout_s", float), ("max_retries", int), ("api_key", str)):
        value = _env("mllm", key)
        if value is not None:
            setattr(config.mllm, key, cast(value))
    for key, cast in (("host", str), ("port", int), ("ui_origin", str),
                      ("request_timeout_s", float), ("parallelism", int)):
        value = _env("service", key)
        if value is not None:
            setattr(config.service, key, cast(value))


def load_config(path: str | Path | None) -> EngineConfig:
    """Parse the config file (if any), then apply environment overrides."""
    config = EngineConfig()
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            obj = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
        base = path.parent

        catalog = obj.get("catalog", {})
        if "manifest" in catalog:
            config.manifest_path = str(base / catalog["manifest"])
        if "embeddings" in catalog:
            config.embedding_path = str(base / catalog["embeddings"])
        if "cache_dir" in obj:
            config.cache_dir = str(base / obj["cache_dir"])
        if "mode" in obj:
            config.mode = str(obj["mode"])

        for key, value in obj.get("mllm", {}).items():
            if hasattr(config.mllm, key):
                setattr(config.mllm, key, value)
        embedder = obj.get("embedder", {})
        config.embedder_kind = str(embedder.get("kind", config.embedder_kind))
        config.embedder_url = str(embedder.get("url", config.embedder_url))
        config.embedder_model = str(embedder.get("model", config.embedder_model))
        config.embedder_dim = int(embedder.get("dim", config.embedder_dim))
        config.embedder_timeout_s = float(
            embedder.get("timeout_s", config.embedder_timeout_s)
        )
        for key, value in obj.get("pipeline", {}).items():
            if hasattr(config.pipeline, key):
                setattr(config.pipeline, key, value)
        for key, value in obj.get("service", {}).items():
            if hasattr(config.service, key):
                setattr(config.service, key, value)

    _apply_env(config)
    if config.mode not in ("replay", "live"):
        raise ConfigError(f"mode must be 'replay' or 'live', got {config.mode!r}")
    config.pipeline.replay = config.replay
    return config


def catalog_paths_from_dir(catalog_dir: str | Path) -> tuple[Path, Path]:
    """The conventional layout: <dir>/manifest.jsonl + <dir>/embeddings.aemb."""
    catalog_dir = Path(catalog_dir)
    manifest = catalog_dir / "manifest.jsonl"
    embeddings = catalog_dir / "embeddings.aemb"
    if not manifest.exists():
        raise ConfigError(f"no manifest at {manifest}")
    if not embeddings.exists():
        raise ConfigError(f"no embeddings at {embeddings}")
    return manifest, embeddings


def build_runtime(config: EngineConfig, catalog: Catalog | None = None) -> EngineRuntime:
    """Load the catalog and wire the collaborators into a runtime."""
    if catalog is None:
        if not config.manifest_path or not config.embedding_path:
            raise ConfigError("catalog manifest/embeddings paths not configured")
        catalog = load_catalog(config.manifest_path, config.embedding_path)
    dim = config.embedder_dim or catalog.dimension
    if config.embedder_kind == "hash":
        embedder = HashingEmbedder(dim=dim, model_id=config.embedder_model)
    elif config.embedder_kind == "http":
        if not config.embedder_url:
            raise ConfigError("embedder.url required for the http embedder")
        embedder = HttpEmbedder(
            config.embedder_url,
            model_id=config.embedder_model,
            dim=dim,
            timeout_s=config.embedder_timeout_s,
        )
    else:
        raise ConfigError(f"unknown embedder kind {config.embedder_kind!r}")
    return EngineRuntime(
        catalog=catalog,
        cache=TranscriptCache(config.cache_dir),
        embedder=embedder,
        mllm=config.mllm,
    )
