"""Exact cosine scoring and top-K retrieval over the catalog.

A full scan in float64, blocked to bound memory. No index structures:
at the catalog sizes in scope an exact scan is fast, deterministic, and
loses nothing to recall. Ordering is total: descending score, then
ascending item_id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from stylefuse.datastore.catalog import Catalog, Item
from stylefuse.errors import EmptyCatalog, TooFewCandidates, UnknownCategory
from stylefuse.fusion import FusionDiagnostics, QueryVector

_BLOCK_ROWS = 65536


@dataclass
class RankedResult:
    """Ordered (item_id, score) pairs plus the query diagnostics."""

    entries: list[tuple[str, float]]
    diagnostics: FusionDiagnostics | None = None

    def item_ids(self) -> list[str]:
        return [item_id for item_id, _ in self.entries]


def _query_array(q: QueryVector | np.ndarray) -> np.ndarray:
    vec = q.q if isinstance(q, QueryVector) else q
    return np.asarray(vec, dtype=np.float64)


def _scores_for_rows(matrix: np.ndarray, rows: np.ndarray, q: np.ndarray) -> np.ndarray:
    scores = np.empty(len(rows), dtype=np.float64)
    for start in range(0, len(rows), _BLOCK_ROWS):
        block = rows[start : start + _BLOCK_ROWS]
        scores[start : start + len(block)] = matrix[block].astype(np.float64) @ q
    return scores


def retrieve_top_k(
    q: QueryVector | np.ndarray,
    catalog: Catalog,
    k: int,
    category_filter: str | None = None,
) -> RankedResult:
    """Exact top-k by cosine score, deterministic ties by ascending item_id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if category_filter is not None:
        row_list = catalog.category_index.get(category_filter)
        if row_list is None:
            raise UnknownCategory(f"category {category_filter!r} not in catalog")
        rows = np.asarray(row_list, dtype=np.int64)
    else:
        rows = np.arange(len(catalog.items), dtype=np.int64)
    if rows.size == 0:
        raise EmptyCatalog("no items to scan")

    query = _query_array(q)
    scores = _scores_for_rows(catalog.matrix, rows, query)
    ids = np.array([catalog.items[r].item_id for r in rows])
    order = np.lexsort((ids, -scores))[: min(k, rows.size)]

    entries = [(str(ids[i]), float(scores[i])) for i in order]
    diagnostics = q.diagnostics if isinstance(q, QueryVector) else None
    return RankedResult(entries=entries, diagnostics=diagnostics)


def score_fitb(
    q: QueryVector | np.ndarray,
    candidates: Sequence[Item | tuple[str, np.ndarray]],
    catalog: Catalog | None = None,
) -> tuple[list[float], int]:
    """Cosine scores against candidate embeddings and the winning index.

    Candidates are Items (resolved against ``catalog``) or explicit
    (item_id, embedding) pairs. Ties go to the lower item_id.
    """
    if len(candidates) < 2:
        raise TooFewCandidates(f"{len(candidates)} candidates, need at least 2")
    query = _query_array(q)

    resolved: list[tuple[str, np.ndarray]] = []
    for cand in candidates:
        if isinstance(cand, Item):
            if catalog is None:
                raise ValueError("catalog required to resolve Item candidates")
            resolved.append((cand.item_id, catalog.matrix[cand.row]))
        else:
            item_id, vec = cand
            resolved.append((item_id, np.asarray(vec)))

    scores = [float(vec.astype(np.float64) @ query) for _, vec in resolved]
    best = min(
        range(len(resolved)),
        key=lambda i: (-scores[i], resolved[i][0]),
    )
    return scores, best
