"""Deterministic construction of the three-step reasoning prompt.

The prompt walks the model through identifying the outfit, reasoning over
the six aesthetic attributes, and describing the missing item, and demands
a single JSON object back. Prompt bytes are a pure function of the inputs,
so identical inputs always hash to the same transcript-cache key.
"""

from __future__ import annotations

import base64
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from stylefuse.errors import TooManyImages, UnreadableImage
from stylefuse.reasoning.records import ATTRIBUTES, TaskInput

PROMPT_VERSION = "1"

SYSTEM_TEXT = (
    f"[prompt v{PROMPT_VERSION}] You are a professional fashion stylist. "
    "Follow the requested steps and respond with exactly one JSON object, "
    "no surrounding prose."
)

IDENTIFY_HEADER = "### Identify"
THOUGHTS_HEADER = "### Aesthetic Thoughts"
TARGET_HEADER = "### Target Item Description"

_MIME_BY_SUFFIX = {
    ".png": "image/png",
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".webp": "image/webp",
    ".gif": "image/gif",
}


@dataclass(frozen=True)
class PromptImage:
    label: str
    content: bytes
    mime: str
    url: str = ""  # set for remote refs passed through by URL

    @property
    def digest(self) -> str:
        if self.url:
            return hashlib.sha256(self.url.encode("utf-8")).hexdigest()
        return hashlib.sha256(self.content).hexdigest()

    def data_url(self) -> str:
        if self.url:
            return self.url
        encoded = base64.b64encode(self.content).decode("ascii")
        return f"data:{self.mime};base64,{encoded}"


@dataclass
class PromptBundle:
    system_text: str
    user_text: str
    images: list[PromptImage] = field(default_factory=list)

    def prompt_hash(self) -> str:
        """sha256 over the prompt text and image content digests."""
        hasher = hashlib.sha256()
        hasher.update(self.system_text.encode("utf-8"))
        hasher.update(b"\x1e")
        hasher.update(self.user_text.encode("utf-8"))
        for image in self.images:
            hasher.update(b"\x1e")
            hasher.update(image.label.encode("utf-8"))
            hasher.update(b"\x1f")
            hasher.update(image.digest.encode("ascii"))
        return hasher.hexdigest()


def _read_image(ref: str | Path, label: str) -> PromptImage:
    ref_str = str(ref)
    if ref_str.startswith(("http://", "https://")):
        # Remote refs ride along by URL; local files go inline so the
        # request stays self-contained and the cache key content-addressed.
        return PromptImage(label=label, content=b"", mime="image/png", url=ref_str)
    path = Path(ref)
    try:
        content = path.read_bytes()
    except OSError as exc:
        raise UnreadableImage(f"{label}: cannot read {path}: {exc}") from exc
    mime = _MIME_BY_SUFFIX.get(path.suffix.lower(), "image/png")
    return PromptImage(label=label, content=content, mime=mime)


def _schema_line(include_identify: bool, include_thoughts: bool) -> str:
    fields = []
    if include_identify:
        fields.append('"identification": "<one-paragraph summary>"')
    if include_thoughts:
        attr_schema = ", ".join(
            f'"{name}": {{"keyword": "...", "reason": "..."}}' for name in ATTRIBUTES
        )
        fields.append(f'"attributes": {{{attr_schema}}}')
    fields.append('"target_description": "<detailed visual description>"')
    return "{" + ", ".join(fields) + "}"


def build_prompt(
    outfit_image_refs: list[str] | tuple[str, ...],
    task_input: TaskInput,
    include_identify: bool = True,
    include_thoughts: bool = True,
    max_images: int = 16,
) -> PromptBundle:
    """Assemble the reasoning prompt for one query.

    FITB candidate images ride along as labeled attachments; a CIR task
    contributes only its category string. Raises UnreadableImage for
    unreadable files and TooManyImages past ``max_images``.
    """
    if len(outfit_image_refs) < 1:
        raise ValueError("at least one outfit image is required")

    images = [
        _read_image(ref, f"outfit_{k + 1}") for k, ref in enumerate(outfit_image_refs)
    ]
    for k, ref in enumerate(task_input.candidate_image_refs):
        images.append(_read_image(ref, f"candidate_{k + 1}"))
    if len(images) > max_images:
        raise TooManyImages(f"{len(images)} images attached, limit is {max_images}")

    n = len(outfit_image_refs)
    lines = [
        f"You are given {n} images of items forming a partial outfit, "
        f"labeled outfit_1 through outfit_{n}. One item is missing.",
    ]
    if task_input.kind == "fitb":
        m = len(task_input.candidate_image_refs)
        lines.append(
            f"You are also given {m} candidate item images labeled candidate_1 "
            f"through candidate_{m}; the missing item is one of the candidates."
        )
    else:
        lines.append(f"The missing item belongs to the category: {task_input.target_category}")
    lines.append("")
    lines.append("Work through the following steps:")
    lines.append("")

    if include_identify:
        lines.append(IDENTIFY_HEADER)
        lines.append(
            "Describe each outfit item and its functional role (top, bottom, "
            "outerwear, footwear, accessory) and how the items relate to each other."
        )
        lines.append("")

    if include_thoughts:
        lines.append(THOUGHTS_HEADER)
        lines.append(
            "Reason about the missing item across exactly six aesthetic attributes: "
            + ", ".join(ATTRIBUTES)
            + ". For each attribute give a short keyword and a reason explaining "
            "why that choice fits this outfit."
        )
        lines.append("")

    lines.append(TARGET_HEADER)
    lines.append(
        "Write a detailed visual description of the single missing item that best "
        "completes the outfit, grounded in the reasoning above."
    )
    lines.append("")
    lines.append("Respond with one JSON object exactly in this shape:")
    lines.append(_schema_line(include_identify, include_thoughts))

    return PromptBundle(
        system_text=SYSTEM_TEXT,
        user_text="\n".join(lines),
        images=images,
    )
