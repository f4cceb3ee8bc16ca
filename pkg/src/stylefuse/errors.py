"""Typed error hierarchy shared across the engine.

Every error carries a stable machine-readable ``code`` (surfaced in HTTP
error bodies) and an ``exit_code`` bucket for the CLI contract:
1 = validation failure, 2 = runtime failure, 3 = dependency unavailable.
"""

from __future__ import annotations


class EngineError(Exception):
    code = "engine_error"
    exit_code = 2


# --- fusion ---------------------------------------------------------------

class ZeroVector(EngineError):
    """A vector (or weighted sum of vectors) degenerated to near-zero norm."""

    code = "zero_vector"


class EmptyOutfit(EngineError):
    code = "empty_outfit"
    exit_code = 1


class EmptyAttributes(EngineError):
    code = "empty_attributes"
    exit_code = 1


class EmptyCandidates(EngineError):
    code = "empty_candidates"
    exit_code = 1


# --- datastore ------------------------------------------------------------

class FormatError(EngineError):
    code = "format_error"
    exit_code = 1


class DimensionMismatch(EngineError):
    code = "dimension_mismatch"
    exit_code = 1


class MissingEmbedding(EngineError):
    code = "missing_embedding"
    exit_code = 1

    def __init__(self, item_id: str):
        super().__init__(f"no embedding row for item_id {item_id!r}")
        self.item_id = item_id


class DuplicateItemId(EngineError):
    code = "duplicate_item_id"
    exit_code = 1

    def __init__(self, item_id: str, where: str = ""):
        suffix = f" in {where}" if where else ""
        super().__init__(f"duplicate item_id {item_id!r}{suffix}")
        self.item_id = item_id


class UnknownItem(EngineError):
    code = "unknown_item"
    exit_code = 1

    def __init__(self, item_id: str):
        super().__init__(f"unknown item_id {item_id!r}")
        self.item_id = item_id


class UnknownCategory(EngineError):
    code = "unknown_category"
    exit_code = 1


class EmptyCategory(EngineError):
    code = "empty_category"
    exit_code = 1


class EmptyCatalog(EngineError):
    code = "empty_catalog"
    exit_code = 1


# --- retrieval ------------------------------------------------------------

class TooFewCandidates(EngineError):
    code = "too_few_candidates"
    exit_code = 1


# --- reasoning ------------------------------------------------------------

class UnreadableImage(EngineError):
    code = "unreadable_image"
    exit_code = 1


class TooManyImages(EngineError):
    code = "too_many_images"
    exit_code = 1


class EndpointUnavailable(EngineError):
    code = "endpoint_unavailable"
    exit_code = 3


class RequestTimeout(EngineError):
    code = "request_timeout"
    exit_code = 3


class AuthFailure(EngineError):
    code = "auth_failure"
    exit_code = 3


class RateLimited(EngineError):
    code = "rate_limited"
    exit_code = 3


class NoParsableObject(EngineError):
    code = "no_parsable_object"


class MissingTargetDescription(EngineError):
    code = "missing_target_description"


class CacheMissInReplayMode(EngineError):
    code = "cache_miss_in_replay_mode"
    exit_code = 3


# --- embedder -------------------------------------------------------------

class EmbedderUnavailable(EngineError):
    code = "embedder_unavailable"
    exit_code = 3


# --- evaluation -----------------------------------------------------------

class MissingItem(EngineError):
    code = "missing_item"
    exit_code = 1


class MissingVoteShares(EngineError):
    code = "missing_vote_shares"
    exit_code = 1


class MissingAttributeTag(EngineError):
    code = "missing_attribute_tag"
    exit_code = 1


# --- configuration --------------------------------------------------------

class ConfigError(EngineError):
    code = "config_error"
    exit_code = 1
