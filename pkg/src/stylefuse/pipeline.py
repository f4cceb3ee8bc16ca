"""The end-to-end completion pipeline shared by the service, CLI, and harness.

One query runs: cached reasoning -> embed the generated texts -> build
cues -> pick/score candidates. ``PipelineConfig`` carries the toggles the
ablation grid flips; the prompt changes only where the reasoning step
changes (identify, aesthetic thoughts), fusion changes only where the
fusion stage changes (svaf, tau, sign).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from stylefuse.datastore.catalog import Catalog, candidate_pool, embeddings_for
from stylefuse.errors import MissingItem, UnknownItem
from stylefuse.fusion import (
    CueSet,
    FusionConfig,
    FusionDiagnostics,
    QueryVector,
    build_cues,
    de_gf,
    normalize,
)
from stylefuse.reasoning.cache import TranscriptCache, reason_cached
from stylefuse.reasoning.client import MllmClient
from stylefuse.reasoning.records import MllmConfig, ReasoningRecord, TaskInput
from stylefuse.retrieval import RankedResult, retrieve_top_k, score_fitb


@dataclass
class PipelineConfig:
    """Toggles and knobs for one pipeline variant.

    ``aesthetic_thoughts=False`` drops the thoughts step from the prompt
    and the aesthetic cue from fusion; ``svaf_enabled=False`` collapses
    the query to the target-text embedding alone.
    """

    identify_step: bool = True
    svaf_enabled: bool = True
    aesthetic_thoughts: bool = True
    tau: float = 0.01
    aava_sign: int = 1
    gate_temperature: float = 1.0
    pool_size: int = 100
    model: str | None = None  # None: use the MllmConfig default
    replay: bool = False

    def fusion_config(self) -> FusionConfig:
        return FusionConfig(
            tau=self.tau,
            aava_sign=self.aava_sign,
            svaf_enabled=self.svaf_enabled,
            gate_temperature=self.gate_temperature,
        )

    def to_obj(self) -> dict:
        return {
            "identify_step": self.identify_step,
            "svaf_enabled": self.svaf_enabled,
            "aesthetic_thoughts": self.aesthetic_thoughts,
            "tau": self.tau,
            "aava_sign": self.aava_sign,
            "gate_temperature": self.gate_temperature,
            "pool_size": self.pool_size,
            "model": self.model,
            "replay": self.replay,
        }


@dataclass
class EngineRuntime:
    """Everything a pipeline run needs: catalog, cache, clients."""

    catalog: Catalog
    cache: TranscriptCache
    embedder: object  # Embedder protocol
    mllm: MllmConfig = field(default_factory=MllmConfig)
    mllm_client: MllmClient | None = None

    def mllm_config_for(self, config: PipelineConfig) -> MllmConfig:
        if config.model and config.model != self.mllm.model:
            return replace(self.mllm, model=config.model)
        return self.mllm


@dataclass
class PipelineOutcome:
    """Everything one query produced, for responses and eval records."""

    record: ReasoningRecord
    query: QueryVector
    cues: CueSet | None


def reason_for(
    runtime: EngineRuntime,
    outfit_item_ids: Sequence[str],
    task_input: TaskInput,
    config: PipelineConfig,
) -> ReasoningRecord:
    catalog = runtime.catalog
    refs = [str(catalog.image_path(catalog.item(item_id))) for item_id in outfit_item_ids]
    return reason_cached(
        refs,
        task_input,
        runtime.mllm_config_for(config),
        runtime.cache,
        replay=config.replay,
        client=runtime.mllm_client,
        include_identify=config.identify_step,
        include_thoughts=config.aesthetic_thoughts,
    )


def embed_record(
    runtime: EngineRuntime,
    record: ReasoningRecord,
    config: PipelineConfig,
) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Embed the target description and the complete attribute thoughts."""
    attributes = record.profile.complete_attributes() if config.aesthetic_thoughts else []
    texts = [record.target_description] + [
        record.profile.thoughts[name].text() for name in attributes
    ]
    matrix = runtime.embedder.embed_texts(texts)
    target_vec = normalize(matrix[0])
    attribute_vecs = {
        name: normalize(matrix[i + 1]) for i, name in enumerate(attributes)
    }
    return target_vec, attribute_vecs


def cues_for(
    runtime: EngineRuntime,
    outfit_item_ids: Sequence[str],
    record: ReasoningRecord,
    config: PipelineConfig,
) -> tuple[CueSet, FusionDiagnostics]:
    outfit_vecs = embeddings_for(runtime.catalog, outfit_item_ids)
    target_vec, attribute_vecs = embed_record(runtime, record, config)
    return build_cues(outfit_vecs, target_vec, attribute_vecs or None, config.fusion_config())


def _query_from_cues(
    cues: CueSet,
    diagnostics: FusionDiagnostics,
    pool_vectors: Sequence[np.ndarray],
    config: PipelineConfig,
) -> QueryVector:
    if not config.svaf_enabled:
        return QueryVector(q=cues.text, diagnostics=FusionDiagnostics.empty())
    return de_gf(
        cues,
        pool_vectors,
        gate_temperature=config.gate_temperature,
        base_diagnostics=diagnostics,
    )


def run_recommend(
    runtime: EngineRuntime,
    outfit_item_ids: Sequence[str],
    target_category: str,
    k: int,
    config: PipelineConfig,
) -> tuple[RankedResult, PipelineOutcome]:
    """Category-constrained completion: the CIR path, also the service path."""
    record = reason_for(
        runtime, outfit_item_ids, TaskInput(target_category=target_category), config
    )
    cues, diagnostics = cues_for(runtime, outfit_item_ids, record, config)
    pool = candidate_pool(runtime.catalog, target_category, cues, config.pool_size)
    query = _query_from_cues(cues, diagnostics, [vec for _, vec in pool], config)
    ranking = retrieve_top_k(query, runtime.catalog, k, category_filter=target_category)
    return ranking, PipelineOutcome(record=record, query=query, cues=cues)


def run_fitb(
    runtime: EngineRuntime,
    outfit_item_ids: Sequence[str],
    candidate_item_ids: Sequence[str],
    config: PipelineConfig,
) -> tuple[list[float], int, PipelineOutcome]:
    """Candidate-set completion: the FITB path."""
    catalog = runtime.catalog
    try:
        candidate_refs = tuple(
            str(catalog.image_path(catalog.item(item_id))) for item_id in candidate_item_ids
        )
        candidate_vecs = embeddings_for(catalog, candidate_item_ids)
    except UnknownItem as exc:
        raise MissingItem(str(exc)) from exc

    record = reason_for(
        runtime, outfit_item_ids, TaskInput(candidate_image_refs=candidate_refs), config
    )
    cues, diagnostics = cues_for(runtime, outfit_item_ids, record, config)
    query = _query_from_cues(cues, diagnostics, candidate_vecs, config)
    scores, chosen = score_fitb(
        query, list(zip(candidate_item_ids, candidate_vecs))
    )
    return scores, chosen, PipelineOutcome(record=record, query=query, cues=cues)
