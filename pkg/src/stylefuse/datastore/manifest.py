"""Line-delimited JSON loaders: item manifests and question sets.

One JSON object per line, UTF-8. Schemas (see also docs/formats.md):

* manifest:   {"item_id", "category", "description", "image_ref"}
* FITB:       {"question_id", "outfit_item_ids", "candidate_item_ids",
               "answer_index"}
* CIR:        {"query_id", "outfit_item_ids", "target_category",
               "ground_truth_item_id"}
* A100:       {"question_id", "test_kind": "lat"|"aat", "attribute_tag"?,
               "outfit_item_ids", "candidate_item_ids", "answer_index",
               "vote_shares"?}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from stylefuse.errors import DuplicateItemId, FormatError
from stylefuse.reasoning.records import ATTRIBUTES

VOTE_SHARE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class ManifestEntry:
    item_id: str
    category: str
    description: str
    image_ref: str


@dataclass(frozen=True)
class FitbQuestion:
    question_id: str
    outfit_item_ids: tuple[str, ...]
    candidate_item_ids: tuple[str, ...]
    answer_index: int


@dataclass(frozen=True)
class CirQuery:
    query_id: str
    outfit_item_ids: tuple[str, ...]
    target_category: str
    ground_truth_item_id: str


@dataclass(frozen=True)
class A100Question:
    question_id: str
    test_kind: str  # "lat" or "aat"
    outfit_item_ids: tuple[str, ...]
    candidate_item_ids: tuple[str, ...]
    answer_index: int
    attribute_tag: str | None = None
    vote_shares: tuple[float, ...] | None = None


def _iter_json_lines(path: str | Path) -> Iterator[tuple[int, dict]]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                obj = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise FormatError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def _require(obj: dict, key: str, path, lineno: int):
    if key not in obj:
        raise FormatError(f"{path}:{lineno}: missing field {key!r}")
    return obj[key]


def _id_list(obj: dict, key: str, path, lineno: int, minimum: int = 1) -> tuple[str, ...]:
    value = _require(obj, key, path, lineno)
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise FormatError(f"{path}:{lineno}: {key} must be a list of strings")
    if len(value) < minimum:
        raise FormatError(f"{path}:{lineno}: {key} needs at least {minimum} entries")
    return tuple(value)


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    """Load and validate an item manifest; duplicate ids are fatal."""
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    for lineno, obj in _iter_json_lines(path):
        item_id = str(_require(obj, "item_id", path, lineno))
        if not item_id:
            raise FormatError(f"{path}:{lineno}: empty item_id")
        if item_id in seen:
            raise DuplicateItemId(item_id, where=str(path))
        seen.add(item_id)
        entries.append(
            ManifestEntry(
                item_id=item_id,
                category=str(_require(obj, "category", path, lineno)),
                description=str(obj.get("description", "")),
                image_ref=str(_require(obj, "image_ref", path, lineno)),
            )
        )
    return entries


def load_fitb_questions(path: str | Path) -> list[FitbQuestion]:
    questions = []
    for lineno, obj in _iter_json_lines(path):
        candidates = _id_list(obj, "candidate_item_ids", path, lineno, minimum=2)
        answer = _require(obj, "answer_index", path, lineno)
        if not isinstance(answer, int) or not (0 <= answer < len(candidates)):
            raise FormatError(f"{path}:{lineno}: answer_index out of candidate range")
        questions.append(
            FitbQuestion(
                question_id=str(_require(obj, "question_id", path, lineno)),
                outfit_item_ids=_id_list(obj, "outfit_item_ids", path, lineno),
                candidate_item_ids=candidates,
                answer_index=answer,
            )
        )
    return questions


def load_cir_queries(path: str | Path) -> list[CirQuery]:
    queries = []
    for lineno, obj in _iter_json_lines(path):
        queries.append(
            CirQuery(
                query_id=str(_require(obj, "query_id", path, lineno)),
                outfit_item_ids=_id_list(obj, "outfit_item_ids", path, lineno),
                target_category=str(_require(obj, "target_category", path, lineno)),
                ground_truth_item_id=str(_require(obj, "ground_truth_item_id", path, lineno)),
            )
        )
    return queries


def load_a100_questions(path: str | Path) -> list[A100Question]:
    questions = []
    for lineno, obj in _iter_json_lines(path):
        kind = str(_require(obj, "test_kind", path, lineno)).lower()
        if kind not in ("lat", "aat"):
            raise FormatError(f"{path}:{lineno}: test_kind must be 'lat' or 'aat'")
        candidates = _id_list(obj, "candidate_item_ids", path, lineno, minimum=2)
        answer = _require(obj, "answer_index", path, lineno)
        if not isinstance(answer, int) or not (0 <= answer < len(candidates)):
            raise FormatError(f"{path}:{lineno}: answer_index out of candidate range")

        attribute_tag = obj.get("attribute_tag")
        if kind == "aat":
            if attribute_tag not in ATTRIBUTES:
                raise FormatError(
                    f"{path}:{lineno}: aat questions need an attribute_tag from {ATTRIBUTES}"
                )
        vote_shares = obj.get("vote_shares")
        if vote_shares is not None:
            if (
                not isinstance(vote_shares, list)
                or len(vote_shares) != len(candidates)
                or not all(isinstance(v, (int, float)) for v in vote_shares)
            ):
                raise FormatError(
                    f"{path}:{lineno}: vote_shares must list one fraction per candidate"
                )
            total = sum(float(v) for v in vote_shares)
            if abs(total - 1.0) > VOTE_SHARE_TOLERANCE:
                raise FormatError(f"{path}:{lineno}: vote_shares sum {total}, expected 1")
            vote_shares = tuple(float(v) for v in vote_shares)

        questions.append(
            A100Question(
                question_id=str(_require(obj, "question_id", path, lineno)),
                test_kind=kind,
                outfit_item_ids=_id_list(obj, "outfit_item_ids", path, lineno),
                candidate_item_ids=candidates,
                answer_index=answer,
                attribute_tag=attribute_tag,
                vote_shares=vote_shares,
            )
        )
    return questions
