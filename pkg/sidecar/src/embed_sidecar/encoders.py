"""Encoders behind one small interface.

``hash:<dim>`` is the deterministic content-addressed encoder: every
payload maps to a digest-seeded standard-normal draw, identical on every
machine, CPU-only, no weights. It keeps the full pipeline runnable and
testable offline. ``clip:<model>`` loads a joint image-text encoder via
transformers when weights are available; any encoder with a shared
image-text space satisfies the engine's interface.

Raw (unnormalized) vectors come out of ``embed_*``; the engine
normalizes at ingest. Catalog export is the exception: the AEMB catalog
format requires unit rows, so the exporter normalizes before writing.
"""

from __future__ import annotations

import hashlib
from typing import Protocol, Sequence

import numpy as np


class Encoder(Protocol):
    model_id: str
    dim: int

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray: ...

    def embed_images(self, payloads: Sequence[bytes]) -> np.ndarray: ...


class HashEncoder:
    def __init__(self, dim: int = 512, model_id: str = "hash-v1"):
        self.dim = dim
        self.model_id = model_id

    def _vector(self, kind: str, payload: bytes) -> np.ndarray:
        digest = hashlib.sha256(
            self.model_id.encode("utf-8") + b"\x1f" + kind.encode("ascii") + b"\x1f" + payload
        ).digest()
        seed = int.from_bytes(digest[:8], "little")
        rng = np.random.Generator(np.random.PCG64(seed))
        return rng.standard_normal(self.dim)

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        rows = [self._vector("text", t.encode("utf-8")) for t in texts]
        return np.stack(rows, axis=0) if rows else np.zeros((0, self.dim))

    def embed_images(self, payloads: Sequence[bytes]) -> np.ndarray:
        rows = [self._vector("image", p) for p in payloads]
        return np.stack(rows, axis=0) if rows else np.zeros((0, self.dim))


class ClipEncoder:
    """Joint image-text encoder loaded through transformers (needs weights)."""

    def __init__(self, model_name: str):
        import io

        from PIL import Image  # noqa: F401  (decode path below)
        from transformers import CLIPModel, CLIPProcessor

        self._io = io
        self.model = CLIPModel.from_pretrained(model_name)
        self.processor = CLIPProcessor.from_pretrained(model_name)
        self.model_id = model_name
        self.dim = int(self.model.config.projection_dim)

    def embed_texts(self, texts: Sequence[str]) -> np.ndarray:
        import torch

        inputs = self.processor(text=list(texts), return_tensors="pt",
                                padding=True, truncation=True)
        with torch.no_grad():
            features = self.model.get_text_features(**inputs)
        return features.cpu().numpy().astype(np.float64)

    def embed_images(self, payloads: Sequence[bytes]) -> np.ndarray:
        import torch
        from PIL import Image

        images = [Image.open(self._io.BytesIO(p)).convert("RGB") for p in payloads]
        inputs = self.processor(images=images, return_tensors="pt")
        with torch.no_grad():
            features = self.model.get_image_features(**inputs)
        return features.cpu().numpy().astype(np.float64)


def load_encoder(spec: str) -> Encoder:
    """Parse an encoder spec: ``hash:<dim>`` or ``clip:<model-name>``."""
    kind, _, arg = spec.partition(":")
    if kind == "hash":
        return HashEncoder(dim=int(arg) if arg else 512)
    if kind == "clip":
        if not arg:
            raise ValueError("clip encoder needs a model name, e.g. clip:patrickjohncyh/fashion-clip")
        return ClipEncoder(arg)
    raise ValueError(f"unknown encoder spec {spec!r}")
