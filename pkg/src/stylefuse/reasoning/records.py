"""Domain types for the reasoning stage."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

# The closed set of aesthetic attributes, in canonical order.
ATTRIBUTES: tuple[str, ...] = ("color", "style", "occasion", "season", "material", "balance")


@dataclass(frozen=True)
class AttributeThought:
    keyword: str
    reason: str = ""

    def text(self) -> str:
        """The embeddable text for this thought."""
        keyword = self.keyword.strip()
        reason = self.reason.strip()
        return f"{keyword}. {reason}" if reason else keyword


@dataclass
class AestheticProfile:
    """Per-attribute thoughts plus a completeness flag for each.

    An attribute is complete when its keyword is nonempty after trimming.
    Keys outside ``ATTRIBUTES`` never appear here (dropped at parse time).
    """

    thoughts: dict[str, AttributeThought] = field(default_factory=dict)

    def is_complete(self, attribute: str) -> bool:
        thought = self.thoughts.get(attribute)
        return thought is not None and bool(thought.keyword.strip())

    def complete_attributes(self) -> list[str]:
        return [a for a in ATTRIBUTES if self.is_complete(a)]

    def to_obj(self) -> dict:
        return {
            name: {"keyword": t.keyword, "reason": t.reason}
            for name, t in sorted(self.thoughts.items())
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "AestheticProfile":
        thoughts = {
            name: AttributeThought(keyword=str(t.get("keyword", "")), reason=str(t.get("reason", "")))
            for name, t in obj.items()
            if name in ATTRIBUTES
        }
        return cls(thoughts=thoughts)


@dataclass
class ReasoningRecord:
    """One MLLM transcript: parsed fields plus provenance."""

    identification_summary: str
    target_description: str
    profile: AestheticProfile
    model_id: str
    prompt_hash: str  # hex sha256 of the prompt bundle
    raw_response: str
    created_at: str  # UTC ISO-8601

    def to_json(self) -> str:
        obj = {
            "identification_summary": self.identification_summary,
            "target_description": self.target_description,
            "profile": self.profile.to_obj(),
            "model_id": self.model_id,
            "prompt_hash": self.prompt_hash,
            "raw_response": self.raw_response,
            "created_at": self.created_at,
        }
        return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ReasoningRecord":
        obj = json.loads(text)
        return cls(
            identification_summary=str(obj.get("identification_summary", "")),
            target_description=str(obj["target_description"]),
            profile=AestheticProfile.from_obj(obj.get("profile", {})),
            model_id=str(obj.get("model_id", "")),
            prompt_hash=str(obj.get("prompt_hash", "")),
            raw_response=str(obj.get("raw_response", "")),
            created_at=str(obj.get("created_at", "")),
        )


@dataclass(frozen=True)
class TaskInput:
    """What the task supplies besides the outfit: FITB candidates or a category.

    Exactly one of ``candidate_image_refs`` / ``target_category`` is set.
    """

    target_category: str | None = None
    candidate_image_refs: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        has_category = self.target_category is not None
        has_candidates = len(self.candidate_image_refs) > 0
        if has_category == has_candidates:
            raise ValueError("task input needs a category or candidate images, not both")

    @property
    def kind(self) -> str:
        return "cir" if self.target_category is not None else "fitb"


@dataclass
class MllmConfig:
    """Endpoint and sampling settings for the reasoning model."""

    endpoint: str = ""
    model: str = "gpt-4o"
    temperature: float = 0.0
    timeout_s: float = 60.0
    max_retries: int = 2
    max_images: int = 16
    api_key: str = ""
    max_in_flight: int = 4
    requests_per_second: float = 0.0  # 0 disables rate limiting

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
