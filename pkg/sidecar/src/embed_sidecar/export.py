"""Offline catalog export: images (and optional texts) to AEMB files.

Per-item failures (missing or undecodable image files) are reported and
excluded; only zero successes is fatal. Output rows are unit-normalized
because the engine's catalog loader requires unit vectors; reruns over
unchanged inputs are bitwise identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from embed_sidecar import aemb
from embed_sidecar.encoders import Encoder

_IMAGE_MAGICS = (
    b"\x89PNG\r\n\x1a\n",
    b"\xff\xd8\xff",          # JPEG
    b"GIF87a", b"GIF89a",
    b"RIFF",                   # WebP container
)


@dataclass
class ExportReport:
    exported: int = 0
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"exported": self.exported, "failures": self.failures},
            indent=1, sort_keys=True,
        )


def _load_manifest(path: str | Path) -> list[dict]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries


def _looks_like_image(blob: bytes) -> bool:
    return any(blob.startswith(magic) for magic in _IMAGE_MAGICS)


def _normalize_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix.astype(np.float64), axis=1, keepdims=True)
    return (matrix / norms).astype(np.float32)


def export_catalog(
    image_root: str | Path,
    manifest_path: str | Path,
    output_path: str | Path,
    encoder: Encoder,
    texts_output_path: str | Path | None = None,
) -> ExportReport:
    """Embed every manifest item's image; optionally also its description."""
    image_root = Path(image_root)
    entries = _load_manifest(manifest_path)
    report = ExportReport()

    good: list[tuple[str, bytes, str]] = []  # id, image bytes, description
    for entry in entries:
        item_id = str(entry["item_id"])
        ref = str(entry["image_ref"])
        path = image_root / ref
        try:
            blob = path.read_bytes()
        except OSError as exc:
            report.failures.append({"item_id": item_id, "reason": f"unreadable: {exc}"})
            continue
        if not _looks_like_image(blob):
            report.failures.append({"item_id": item_id, "reason": "not a decodable image"})
            continue
        good.append((item_id, blob, str(entry.get("description", ""))))

    if not good:
        raise RuntimeError("no items exported: every image failed")

    vectors = encoder.embed_images([blob for _, blob, _ in good])
    unit = _normalize_rows(np.asarray(vectors))
    report.exported = aemb.write(
        [(item_id, unit[i]) for i, (item_id, _, _) in enumerate(good)], output_path
    )

    if texts_output_path is not None:
        texts = [desc for _, _, desc in good]
        text_unit = _normalize_rows(np.asarray(encoder.embed_texts(texts)))
        aemb.write(
            [(item_id, text_unit[i]) for i, (item_id, _, _) in enumerate(good)],
            texts_output_path,
        )
    return report
