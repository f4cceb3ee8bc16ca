"""The item catalog: manifest joined with embeddings, plus the vector store.

The catalog is immutable after load and shares one contiguous float32
matrix whose row k is item k's image embedding. Rows are expected to be
unit vectors: drift up to 1e-4 is accepted as-is, drift up to 1e-2 is
re-normalized with a load warning, anything further is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from stylefuse.datastore.aemb import read_embeddings
from stylefuse.datastore.manifest import load_manifest
from stylefuse.errors import (
    DimensionMismatch,
    EmptyCategory,
    MissingEmbedding,
    UnknownCategory,
    UnknownItem,
)
from stylefuse.fusion import CueSet

NORM_OK = 1e-4
NORM_RENORM_BAND = 1e-2


@dataclass(frozen=True)
class Item:
    item_id: str
    category: str
    description: str
    image_ref: str
    row: int  # index into Catalog.matrix


@dataclass
class Catalog:
    dimension: int
    items: list[Item]
    matrix: np.ndarray  # float32, shape (len(items), dimension)
    category_index: dict[str, list[int]]
    id_index: dict[str, int]
    image_root: Path
    load_warnings: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.items)

    def item(self, item_id: str) -> Item:
        row = self.id_index.get(item_id)
        if row is None:
            raise UnknownItem(item_id)
        return self.items[row]

    def embedding(self, item_id: str) -> np.ndarray:
        return self.matrix[self.item(item_id).row]

    def image_path(self, item: Item) -> str:
        """Resolved image location: URLs pass through, paths anchor at the manifest."""
        if item.image_ref.startswith(("http://", "https://")):
            return item.image_ref
        return str(self.image_root / item.image_ref)


def load_catalog(manifest_path: str | Path, embedding_path: str | Path) -> Catalog:
    """Join a manifest with an AEMB file by item_id and build the indexes."""
    manifest_path = Path(manifest_path)
    entries = load_manifest(manifest_path)
    dim, records = read_embeddings(embedding_path)
    by_id = {item_id: vec for item_id, vec in records}

    matrix = np.zeros((len(entries), dim), dtype=np.float32)
    items: list[Item] = []
    category_index: dict[str, list[int]] = {}
    id_index: dict[str, int] = {}
    warnings: list[str] = []

    for row, entry in enumerate(entries):
        vec = by_id.get(entry.item_id)
        if vec is None:
            raise MissingEmbedding(entry.item_id)
        if vec.shape[0] != dim:
            raise DimensionMismatch(
                f"{entry.item_id}: dim {vec.shape[0]} != declared {dim}"
            )
        norm = float(np.linalg.norm(vec.astype(np.float64)))
        drift = abs(norm - 1.0)
        if drift > NORM_RENORM_BAND:
            raise DimensionMismatch(
                f"{entry.item_id}: embedding norm {norm:.4f} outside the "
                f"±{NORM_RENORM_BAND} renormalization band"
            )
        if drift > NORM_OK:
            vec = (vec.astype(np.float64) / norm).astype(np.float32)
            warnings.append(
                f"{entry.item_id}: norm {norm:.6f} re-normalized at load"
            )
        matrix[row] = vec
        items.append(
            Item(
                item_id=entry.item_id,
                category=entry.category,
                description=entry.description,
                image_ref=entry.image_ref,
                row=row,
            )
        )
        id_index[entry.item_id] = row
        category_index.setdefault(entry.category, []).append(row)

    return Catalog(
        dimension=dim,
        items=items,
        matrix=matrix,
        category_index=category_index,
        id_index=id_index,
        image_root=manifest_path.parent,
        load_warnings=warnings,
    )


def candidate_pool(
    catalog: Catalog,
    target_category: str,
    cues: CueSet,
    pool_size: int = 100,
) -> list[tuple[int, np.ndarray]]:
    """Top candidates of a category, ranked by mean similarity to the cues.

    Returns (row index, embedding) pairs sorted by descending mean cosine
    similarity over the present cues, ties broken by ascending item_id,
    truncated to ``pool_size``.
    """
    if pool_size < 1:
        raise ValueError("pool_size must be >= 1")
    rows = catalog.category_index.get(target_category)
    if rows is None:
        raise UnknownCategory(f"category {target_category!r} not in catalog")
    if not rows:
        raise EmptyCategory(f"category {target_category!r} has no items")

    cue_vectors = [vec for _, vec in cues.present()]
    block = catalog.matrix[rows].astype(np.float64)
    mean_sims = np.zeros(len(rows), dtype=np.float64)
    for vec in cue_vectors:
        mean_sims += block @ np.asarray(vec, dtype=np.float64)
    mean_sims /= len(cue_vectors)

    ranked = sorted(
        range(len(rows)),
        key=lambda i: (-mean_sims[i], catalog.items[rows[i]].item_id),
    )
    chosen = ranked[:pool_size]
    return [(rows[i], catalog.matrix[rows[i]]) for i in chosen]


def embeddings_for(catalog: Catalog, item_ids: Sequence[str]) -> list[np.ndarray]:
    """Image embeddings for the given ids, in order; unknown ids are fatal."""
    vectors = []
    for item_id in item_ids:
        row = catalog.id_index.get(item_id)
        if row is None:
            raise UnknownItem(item_id)
        vectors.append(catalog.matrix[row])
    return vectors
