"""Total parser for model responses.

Responses are supposed to be a single JSON object but arrive wrapped in
code fences, prefixed with prose, or mildly mangled. The parser extracts
the first balanced top-level object, validates the fields it can, and
degrades gracefully: missing attributes are just incomplete, only a
missing target description is fatal. It never raises anything but the
two typed errors below, regardless of input.
"""

from __future__ import annotations

import json
import logging

from stylefuse.errors import MissingTargetDescription, NoParsableObject
from stylefuse.reasoning.records import (
    ATTRIBUTES,
    AestheticProfile,
    AttributeThought,
    ReasoningRecord,
)

logger = logging.getLogger("stylefuse.reasoning")


def extract_first_object(text: str) -> dict | None:
    """First balanced ``{...}`` in ``text`` that parses as a JSON object.

    Tracks string/escape state so braces inside strings don't confuse the
    balance; on a parse failure, scanning resumes at the next opening brace.
    """
    start = text.find("{")
    while start != -1:
        depth = 0
        in_string = False
        escaped = False
        for pos in range(start, len(text)):
            char = text[pos]
            if in_string:
                if escaped:
                    escaped = False
                elif char == "\\":
                    escaped = True
                elif char == '"':
                    in_string = False
                continue
            if char == '"':
                in_string = True
            elif char == "{":
                depth += 1
            elif char == "}":
                depth -= 1
                if depth == 0:
                    candidate = text[start : pos + 1]
                    try:
                        obj = json.loads(candidate)
                    except json.JSONDecodeError:
                        break
                    if isinstance(obj, dict):
                        return obj
                    break
        start = text.find("{", start + 1)
    return None


def _clean_str(value: object) -> str:
    return value.strip() if isinstance(value, str) else ""


def parse_profile(raw_attributes: object) -> AestheticProfile:
    """Build a profile from whatever the ``attributes`` field held.

    Keys outside the six-attribute set are dropped (and logged); entries
    that are not objects, or whose keyword trims to empty, stay incomplete.
    """
    profile = AestheticProfile()
    if not isinstance(raw_attributes, dict):
        return profile
    for key, value in raw_attributes.items():
        name = str(key).strip().lower()
        if name not in ATTRIBUTES:
            logger.debug("dropping unknown attribute key %r", key)
            continue
        if isinstance(value, dict):
            keyword = _clean_str(value.get("keyword"))
            reason = _clean_str(value.get("reason"))
        elif isinstance(value, str):
            keyword, reason = value.strip(), ""
        else:
            continue
        if keyword:
            profile.thoughts[name] = AttributeThought(keyword=keyword, reason=reason)
    return profile


def parse_reasoning(
    raw: str,
    model_id: str = "",
    prompt_hash: str = "",
    created_at: str = "",
) -> ReasoningRecord:
    """Parse a raw response into a record; typed errors, never a crash."""
    if not isinstance(raw, str) or not raw.strip():
        raise NoParsableObject("empty response")
    obj = extract_first_object(raw)
    if obj is None:
        raise NoParsableObject("no balanced JSON object found in response")

    target = _clean_str(obj.get("target_description"))
    if not target:
        raise MissingTargetDescription("response object lacks a target_description")

    return ReasoningRecord(
        identification_summary=_clean_str(obj.get("identification")),
        target_description=target,
        profile=parse_profile(obj.get("attributes")),
        model_id=model_id,
        prompt_hash=prompt_hash,
        raw_response=raw,
        created_at=created_at,
    )
