"""Content-addressed transcript cache for deterministic replay.

The cache key digests everything that determines a completion: prompt
bytes, image content digests, model name, and temperature. One UTF-8
record file per key under ``<dir>/reasoning/<hex>.record``. In replay
mode a miss is an error, which is what makes full-pipeline runs
reproducible on machines with no endpoint access.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from stylefuse.errors import CacheMissInReplayMode
from stylefuse.reasoning.client import MllmClient
from stylefuse.reasoning.parser import parse_reasoning
from stylefuse.reasoning.prompt import PromptBundle, build_prompt
from stylefuse.reasoning.records import MllmConfig, ReasoningRecord, TaskInput


def cache_key(bundle: PromptBundle, model: str, temperature: float) -> str:
    hasher = hashlib.sha256()
    hasher.update(bundle.prompt_hash().encode("ascii"))
    hasher.update(b"\x1e")
    hasher.update(model.encode("utf-8"))
    hasher.update(b"\x1e")
    hasher.update(repr(float(temperature)).encode("ascii"))
    return hasher.hexdigest()


class TranscriptCache:
    """File-per-key record store; concurrent readers, atomic writes."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    @property
    def reasoning_dir(self) -> Path:
        return self.root / "reasoning"

    def path_for(self, key: str) -> Path:
        return self.reasoning_dir / f"{key}.record"

    def get(self, key: str) -> ReasoningRecord | None:
        path = self.path_for(key)
        if not path.exists():
            return None
        return ReasoningRecord.from_json(path.read_text(encoding="utf-8"))

    def put(self, key: str, record: ReasoningRecord) -> None:
        self.reasoning_dir.mkdir(parents=True, exist_ok=True)
        # Atomic rename; last writer wins, which is harmless because the
        # content is deterministic per key.
        fd, temp_path = tempfile.mkstemp(dir=self.reasoning_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(record.to_json())
            os.replace(temp_path, self.path_for(key))
        except BaseException:
            if os.path.exists(temp_path):
                os.unlink(temp_path)
            raise


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def reason_cached(
    outfit_image_refs: list[str] | tuple[str, ...],
    task_input: TaskInput,
    config: MllmConfig,
    cache: TranscriptCache,
    replay: bool = False,
    client: MllmClient | None = None,
    include_identify: bool = True,
    include_thoughts: bool = True,
    now: str | None = None,
) -> ReasoningRecord:
    """Resolve one reasoning call through the cache.

    Cache hit: return the stored record, no network. Miss in replay mode:
    error. Miss in live mode: invoke, parse (one re-invoke on a parse
    failure), store, return.
    """
    bundle = build_prompt(
        outfit_image_refs,
        task_input,
        include_identify=include_identify,
        include_thoughts=include_thoughts,
        max_images=config.max_images,
    )
    key = cache_key(bundle, config.model, config.temperature)
    cached = cache.get(key)
    if cached is not None:
        return cached
    if replay:
        raise CacheMissInReplayMode(f"no transcript for key {key[:12]}… in replay mode")

    own_client = client is None
    if client is None:
        client = MllmClient(config)
    try:
        record: ReasoningRecord | None = None
        last_parse_error: Exception | None = None
        for _ in range(2):  # parse failure earns exactly one re-invocation
            raw = client.invoke(bundle)
            try:
                record = parse_reasoning(
                    raw,
                    model_id=config.model,
                    prompt_hash=bundle.prompt_hash(),
                    created_at=now if now is not None else _utc_now(),
                )
                break
            except Exception as exc:
                last_parse_error = exc
        if record is None:
            assert last_parse_error is not None
            raise last_parse_error
    finally:
        if own_client:
            client.close()

    cache.put(key, record)
    return record
