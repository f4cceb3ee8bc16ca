"""Embedding HTTP service.

POST /embed/text and /embed/image return raw dimension-d vectors;
unit-normalization is the caller's job. GET /health reports the model id
and dimension. Requests are handled serially per process; the engine
client retries with its own timeout.
"""

from __future__ import annotations

import base64
import binascii

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from embed_sidecar.encoders import Encoder

MAX_BATCH = 64


class TextRequest(BaseModel):
    texts: list[str] = Field(min_length=1)
    model: str = ""


class ImageRequest(BaseModel):
    images: list[str] = Field(min_length=1)  # base64 payloads
    model: str = ""


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(encoder: Encoder | None) -> FastAPI:
    """``encoder=None`` models the still-loading state (503 on use)."""
    app = FastAPI(title="stylefuse-sidecar", version="0.1.0")
    state = {"encoder": encoder}

    def ready() -> Encoder | None:
        return state["encoder"]

    app.state.set_encoder = lambda enc: state.__setitem__("encoder", enc)

    @app.get("/health")
    def health():
        enc = ready()
        if enc is None:
            return _error(503, "loading", "encoder still loading")
        return {"status": "ok", "model": enc.model_id, "dim": enc.dim}

    @app.post("/embed/text")
    def embed_text(request: TextRequest):
        enc = ready()
        if enc is None:
            return _error(503, "loading", "encoder still loading")
        if len(request.texts) > MAX_BATCH:
            return _error(413, "batch_too_large", f"batch limit is {MAX_BATCH}")
        if any(not t.strip() for t in request.texts):
            return _error(400, "empty_text", "texts must be nonempty")
        vectors = enc.embed_texts(request.texts)
        return {
            "model": enc.model_id,
            "dim": enc.dim,
            "vectors": [[float(x) for x in row] for row in vectors],
        }

    @app.post("/embed/image")
    def embed_image(request: ImageRequest):
        enc = ready()
        if enc is None:
            return _error(503, "loading", "encoder still loading")
        if len(request.images) > MAX_BATCH:
            return _error(413, "batch_too_large", f"batch limit is {MAX_BATCH}")
        payloads = []
        for i, blob in enumerate(request.images):
            try:
                payloads.append(base64.b64decode(blob, validate=True))
            except (binascii.Error, ValueError):
                return _error(400, "bad_image", f"images[{i}] is not valid base64")
        vectors = enc.embed_images(payloads)
        return {
            "model": enc.model_id,
            "dim": enc.dim,
            "vectors": [[float(x) for x in row] for row in vectors],
        }

    return app
