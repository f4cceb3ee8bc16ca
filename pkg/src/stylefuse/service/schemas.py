"""Request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class ConfigOverrides(BaseModel):
    """Whitelisted per-request knobs; never endpoints or credentials."""

    tau: float | None = Field(default=None, gt=0)
    aava_sign: Literal[1, -1] | None = None


class RecommendRequest(BaseModel):
    outfit_item_ids: list[str] = Field(min_length=1)
    target_category: str
    k: int = Field(default=10, ge=1, le=100)
    overrides: ConfigOverrides | None = None


class RankedItem(BaseModel):
    item_id: str
    score: float
    image_ref: str
    category: str


class AttributeThoughtOut(BaseModel):
    keyword: str
    reason: str


class Explanation(BaseModel):
    identification: str
    target_description: str
    attributes: dict[str, AttributeThoughtOut]


class Diagnostics(BaseModel):
    saliency_weights: list[float]
    attribute_scores: dict[str, float]
    attribute_weights: dict[str, float]
    cue_entropies: dict[str, float]
    gates: dict[str, float]


class RecommendResponse(BaseModel):
    request_id: str
    items: list[RankedItem]
    explanation: Explanation
    diagnostics: Diagnostics


class FitbRequest(BaseModel):
    question_id: str = ""
    outfit_item_ids: list[str] = Field(min_length=1)
    candidate_item_ids: list[str] = Field(min_length=2)


class CandidateScore(BaseModel):
    item_id: str
    score: float


class FitbResponse(BaseModel):
    request_id: str
    scores: list[CandidateScore]
    chosen_item_id: str
    chosen_index: int
    explanation: Explanation
    diagnostics: Diagnostics


class ItemOut(BaseModel):
    item_id: str
    category: str
    description: str
    image_ref: str


class ItemPage(BaseModel):
    items: list[ItemOut]
    page: int
    size: int
    total: int


class ComponentStatus(BaseModel):
    embedder: str
    mllm: str
    cache_mode: str


class HealthResponse(BaseModel):
    status: str
    catalog_size: int
    dimension: int
    components: ComponentStatus


class ErrorBody(BaseModel):
    code: str
    message: str
