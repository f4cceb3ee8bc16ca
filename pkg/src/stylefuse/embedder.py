"""Text/image embedding clients.

The engine treats embedding as a service: ``HttpEmbedder`` talks to the
embedding sidecar, ``HashingEmbedder`` derives vectors deterministically
from content digests (no model, no network — the backbone of replayable
fixtures and tests). Raw vectors come back unnormalized; the fusion layer
normalizes at ingest.
"""

from __future__ import annotations

import hashlib
from typing import Protocol, Sequence

import httpx
import numpy as np

from stylefuse.errors import EmbedderUnavailable

HASH_MODEL_PREFIX = "hash-v1"
MAX_BATCH = 64


class Embedder(Protocol):
    model_id: str
    dim: int

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray: ...


def hash_vector(model_id: str, kind: str, payload: bytes, dim: int) -> np.ndarray:
    """Deterministic pseudo-embedding: digest-seeded standard normal draw."""
    digest = hashlib.sha256(
        model_id.encode("utf-8") + b"\x1f" + kind.encode("ascii") + b"\x1f" + payload
    ).digest()
    seed = int.from_bytes(digest[:8], "little")
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.standard_normal(dim)


class HashingEmbedder:
    """Content-addressed stand-in encoder; identical on every machine."""

    def __init__(self, dim: int, model_id: str = HASH_MODEL_PREFIX):
        self.dim = dim
        self.model_id = model_id

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim), dtype=np.float64)
        rows = [
            hash_vector(self.model_id, "text", text.encode("utf-8"), self.dim)
            for text in texts
        ]
        return np.stack(rows, axis=0)

    def embed_images(self, payloads: Sequence[bytes]) -> np.ndarray:
        rows = [hash_vector(self.model_id, "image", blob, self.dim) for blob in payloads]
        return np.stack(rows, axis=0) if rows else np.zeros((0, self.dim), dtype=np.float64)


class HttpEmbedder:
    """Client for the embedding sidecar's HTTP endpoints."""

    def __init__(
        self,
        url: str,
        model_id: str = "",
        dim: int = 512,
        timeout_s: float = 30.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.url = url.rstrip("/")
        self.model_id = model_id
        self.dim = dim
        self._client = httpx.Client(timeout=timeout_s, transport=transport)

    def close(self) -> None:
        self._client.close()

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(f"{self.url}{path}", json=payload)
        except httpx.HTTPError as exc:
            raise EmbedderUnavailable(f"embedder unreachable: {exc}") from exc
        if response.status_code != 200:
            raise EmbedderUnavailable(
                f"embedder error {response.status_code}: {response.text[:200]}"
            )
        return response.json()

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        rows: list[list[float]] = []
        for start in range(0, len(texts), MAX_BATCH):
            batch = list(texts[start : start + MAX_BATCH])
            payload: dict = {"texts": batch}
            if self.model_id:
                payload["model"] = self.model_id
            body = self._post("/embed/text", payload)
            rows.extend(body["vectors"])
        if not rows:
            return np.zeros((0, self.dim), dtype=np.float64)
        matrix = np.asarray(rows, dtype=np.float64)
        if matrix.shape[1] != self.dim:
            self.dim = int(matrix.shape[1])
        return matrix

    def healthy(self) -> bool:
        try:
            response = self._client.get(f"{self.url}/health")
        except httpx.HTTPError:
            return False
        return response.status_code == 200
