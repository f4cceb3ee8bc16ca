"""Aesthetic reasoning: prompt construction, the MLLM call, parsing, replay."""

from stylefuse.reasoning.cache import TranscriptCache, reason_cached
from stylefuse.reasoning.client import MllmClient
from stylefuse.reasoning.parser import parse_reasoning
from stylefuse.reasoning.prompt import PromptBundle, build_prompt
from stylefuse.reasoning.records import (
    ATTRIBUTES,
    AestheticProfile,
    AttributeThought,
    MllmConfig,
    ReasoningRecord,
    TaskInput,
)

__all__ = [
    "ATTRIBUTES",
    "AestheticProfile",
    "AttributeThought",
    "MllmClient",
    "MllmConfig",
    "PromptBundle",
    "ReasoningRecord",
    "TaskInput",
    "TranscriptCache",
    "build_prompt",
    "parse_reasoning",
    "reason_cached",
]
