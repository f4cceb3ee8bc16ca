"""FastAPI application wrapping the engine runtime.

The catalog is shared immutably across requests; the only mutable shared
state is the append-only transcript cache and the explanation store that
backs GET /explain/{request_id}. Request ids are content-addressed, so
identical requests in replay mode return identical bodies.
"""

from __future__ import annotations

import asyncio
import hashlib
import json
import threading
from dataclasses import replace

from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from stylefuse.config import EngineConfig
from stylefuse.embedder import HttpEmbedder
from stylefuse.errors import (
    AuthFailure,
    CacheMissInReplayMode,
    EmbedderUnavailable,
    EndpointUnavailable,
    EngineError,
    RateLimited,
    RequestTimeout,
    UnknownCategory,
    UnknownItem,
)
from stylefuse.pipeline import EngineRuntime, run_fitb, run_recommend
from stylefuse.service import schemas

MAX_PAGE_SIZE = 200

_REASONING_DOWN = (EndpointUnavailable, RequestTimeout, AuthFailure, RateLimited,
                   CacheMissInReplayMode)


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _request_id(kind: str, payload: dict, config_obj: dict) -> str:
    canonical = json.dumps(
        {"kind": kind, "payload": payload, "config": config_obj}, sort_keys=True
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:24]


def _explanation_obj(record) -> dict:
    return {
        "identification": record.identification_summary,
        "target_description": record.target_description,
        "attributes": {
            name: {"keyword": t.keyword, "reason": t.reason}
            for name, t in sorted(record.profile.thoughts.items())
        },
    }


def create_app(runtime: EngineRuntime, config: EngineConfig) -> FastAPI:
    app = FastAPI(title="stylefuse", version="0.1.0")
    if config.service.ui_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.service.ui_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    explanations: dict[str, dict] = {}
    explanations_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        return _error_response(400, "invalid_request", str(exc.errors()[:3]))

    @app.exception_handler(EngineError)
    async def _engine_error_handler(request: Request, exc: EngineError):
        if isinstance(exc, _REASONING_DOWN):
            return _error_response(503, "reasoning_unavailable", str(exc))
        if isinstance(exc, EmbedderUnavailable):
            return _error_response(503, "embedder_unavailable", str(exc))
        return _error_response(400, exc.code, str(exc))

    def _pipeline_config(overrides: schemas.ConfigOverrides | None):
        pipeline = replace(config.pipeline, replay=config.replay)
        if overrides is not None:
            if overrides.tau is not None:
                pipeline = replace(pipeline, tau=overrides.tau)
            if overrides.aava_sign is not None:
                pipeline = replace(pipeline, aava_sign=overrides.aava_sign)
        return pipeline

    def _validate_ids(item_ids: list[str]) -> None:
        for item_id in item_ids:
            if item_id not in runtime.catalog.id_index:
                raise UnknownItem(item_id)

    async def _run_bounded(func):
        loop = asyncio.get_running_loop()
        try:
            return await asyncio.wait_for(
                loop.run_in_executor(None, func),
                timeout=config.service.request_timeout_s,
            )
        except asyncio.TimeoutError:
            return None

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        embedder_status = "local"
        if isinstance(runtime.embedder, HttpEmbedder):
            embedder_status = "ok" if runtime.embedder.healthy() else "down"
        if config.replay:
            mllm_status = "replay"
        elif runtime.mllm.endpoint:
            mllm_status = "configured"
        else:
            mllm_status = "unconfigured"
        degraded = embedder_status == "down" or mllm_status == "unconfigured"
        return schemas.HealthResponse(
            status="degraded" if degraded else "ok",
            catalog_size=len(runtime.catalog),
            dimension=runtime.catalog.dimension,
            components=schemas.ComponentStatus(
                embedder=embedder_status,
                mllm=mllm_status,
                cache_mode=config.mode,
            ),
        )

    @app.get("/items", response_model=schemas.ItemPage)
    def items(
        response: Response,
        category: str | None = Query(default=None),
        page: int = Query(default=1, ge=1),
        size: int = Query(default=50, ge=1, le=MAX_PAGE_SIZE),
    ) -> schemas.ItemPage:
        selected = runtime.catalog.items
        if category is not None:
            rows = runtime.catalog.category_index.get(category, [])
            selected = [runtime.catalog.items[r] for r in rows]
        ordered = sorted(selected, key=lambda item: item.item_id)
        start = (page - 1) * size
        window = ordered[start : start + size]
        response.headers["X-Total-Count"] = str(len(ordered))
        return schemas.ItemPage(
            items=[
                schemas.ItemOut(
                    item_id=i.item_id,
                    category=i.category,
                    description=i.description,
                    image_ref=i.image_ref,
                )
                for i in window
            ],
            page=page,
            size=size,
            total=len(ordered),
        )

    @app.post("/recommend", response_model=schemas.RecommendResponse)
    async def recommend(request: schemas.RecommendRequest):
        _validate_ids(request.outfit_item_ids)
        if request.target_category not in runtime.catalog.category_index:
            raise UnknownCategory(f"category {request.target_category!r} not in catalog")
        pipeline = _pipeline_config(request.overrides)
        request_id = _request_id(
            "recommend", request.model_dump(), pipeline.to_obj()
        )

        def work():
            return run_recommend(
                runtime,
                request.outfit_item_ids,
                request.target_category,
                request.k,
                pipeline,
            )

        result = await _run_bounded(work)
        if result is None:
            return _error_response(504, "timeout", "recommendation timed out")
        ranking, outcome = result

        explanation = _explanation_obj(outcome.record)
        with explanations_lock:
            explanations[request_id] = explanation
        return schemas.RecommendResponse(
            request_id=request_id,
            items=[
                schemas.RankedItem(
                    item_id=item_id,
                    score=score,
                    image_ref=runtime.catalog.item(item_id).image_ref,
                    category=runtime.catalog.item(item_id).category,
                )
                for item_id, score in ranking.entries
            ],
            explanation=schemas.Explanation(**explanation),
            diagnostics=schemas.Diagnostics(**outcome.query.diagnostics.to_obj()),
        )

    @app.post("/fitb", response_model=schemas.FitbResponse)
    async def fitb(request: schemas.FitbRequest):
        _validate_ids(request.outfit_item_ids)
        _validate_ids(request.candidate_item_ids)
        pipeline = _pipeline_config(None)
        request_id = _request_id("fitb", request.model_dump(), pipeline.to_obj())

        def work():
            return run_fitb(
                runtime, request.outfit_item_ids, request.candidate_item_ids, pipeline
            )

        result = await _run_bounded(work)
        if result is None:
            return _error_response(504, "timeout", "scoring timed out")
        scores, chosen, outcome = result

        explanation = _explanation_obj(outcome.record)
        with explanations_lock:
            explanations[request_id] = explanation
        return schemas.FitbResponse(
            request_id=request_id,
            scores=[
                schemas.CandidateScore(item_id=item_id, score=score)
                for item_id, score in zip(request.candidate_item_ids, scores)
            ],
            chosen_item_id=request.candidate_item_ids[chosen],
            chosen_index=chosen,
            explanation=schemas.Explanation(**explanation),
            diagnostics=schemas.Diagnostics(**outcome.query.diagnostics.to_obj()),
        )

    @app.get("/explain/{request_id}")
    def explain(request_id: str):
        with explanations_lock:
            stored = explanations.get(request_id)
        if stored is None:
            return _error_response(404, "unknown_request", f"no explanation for {request_id}")
        return stored

    return app


def create_app_from_config(config: EngineConfig) -> FastAPI:
    from stylefuse.config import build_runtime

    return create_app(build_runtime(config), config)
