"""Query-vector construction from visual, textual, and aesthetic cues.

Pure, deterministic math. Given unit embeddings for the partial outfit's
item images, the generated target-item description, and (optionally) the
six aesthetic-attribute thoughts, produce one fused query vector:

* saliency aggregation: softmax weights at temperature ``tau`` over each
  outfit image's similarity to the target text, then a weighted mean —
  keeps the garments that matter for the missing slot, mutes the rest;
* adaptive attribute aggregation: attribute vectors are exp-weighted by
  their mean alignment with the target text and the visual summary;
* entropy gating: each cue's similarity distribution over the candidate
  pool is scored by Shannon entropy (nats); confident, low-entropy cues
  get larger gates ``exp(-H)``, normalized into a convex combination.

All functions re-normalize their vector inputs, so they are idempotent on
unit vectors and safe on float32 catalog rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from stylefuse.errors import (
    EmptyAttributes,
    EmptyCandidates,
    EmptyOutfit,
    ZeroVector,
)

# Cue names used in diagnostics maps, in fusion order.
CUE_VISUAL = "visual"
CUE_TEXT = "text"
CUE_AESTHETIC = "aesthetic"

_NORM_FLOOR = 1e-12


def normalize(v: Sequence[float] | np.ndarray) -> np.ndarray:
    """Scale ``v`` to unit L2 norm (float64). Raises ZeroVector below 1e-12."""
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector contains NaN or Inf")
    norm = float(np.linalg.norm(arr))
    if norm <= _NORM_FLOOR:
        raise ZeroVector(f"vector norm {norm:.3e} below {_NORM_FLOOR:.0e}")
    return arr / norm


def softmax(logits: np.ndarray) -> np.ndarray:
    """Shift-stable softmax over a 1-d array of finite logits."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - float(np.max(logits))
    exp = np.exp(shifted)
    return exp / float(np.sum(exp))


@dataclass
class FusionConfig:
    """Tunable knobs for query construction.

    ``tau`` is the saliency softmax temperature (default 0.01: near-argmax
    selection of the outfit image closest to the target text).
    ``aava_sign`` flips the attribute weighting: +1 up-weights attributes
    already aligned with the target/visual cues, -1 up-weights the ones
    they under-represent. ``gate_temperature`` scales candidate
    similarities before the entropy gate's softmax.
    """

    tau: float = 0.01
    aava_sign: int = 1
    svaf_enabled: bool = True
    gate_temperature: float = 1.0

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.aava_sign not in (1, -1):
            raise ValueError("aava_sign must be +1 or -1")
        if self.gate_temperature <= 0:
            raise ValueError("gate_temperature must be positive")


@dataclass
class FusionDiagnostics:
    """Everything needed to audit one fused query."""

    saliency_weights: list[float] = field(default_factory=list)
    attribute_scores: dict[str, float] = field(default_factory=dict)
    attribute_weights: dict[str, float] = field(default_factory=dict)
    cue_entropies: dict[str, float] = field(default_factory=dict)
    gates: dict[str, float] = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {
            "saliency_weights": list(self.saliency_weights),
            "attribute_scores": dict(self.attribute_scores),
            "attribute_weights": dict(self.attribute_weights),
            "cue_entropies": dict(self.cue_entropies),
            "gates": dict(self.gates),
        }

    @classmethod
    def empty(cls) -> "FusionDiagnostics":
        return cls()


@dataclass
class QueryVector:
    """A unit-norm query plus the diagnostics that produced it."""

    q: np.ndarray
    diagnostics: FusionDiagnostics


@dataclass
class CueSet:
    """The cues entering entropy-gated fusion; ``text`` is always present."""

    text: np.ndarray
    visual: np.ndarray | None = None
    aesthetic: np.ndarray | None = None

    def present(self) -> list[tuple[str, np.ndarray]]:
        cues: list[tuple[str, np.ndarray]] = []
        if self.visual is not None:
            cues.append((CUE_VISUAL, self.visual))
        cues.append((CUE_TEXT, self.text))
        if self.aesthetic is not None:
            cues.append((CUE_AESTHETIC, self.aesthetic))
        return cues


def ta_isa(
    target_text: np.ndarray,
    outfit: Sequence[np.ndarray],
    tau: float = 0.01,
) -> tuple[np.ndarray, np.ndarray]:
    """Saliency-weighted visual summary of the outfit.

    Returns ``(weights, visual)``: softmax weights (temperature ``tau``)
    over each outfit image's cosine similarity to the target text, and the
    unit-normalized weighted mean of the outfit vectors.
    """
    if len(outfit) == 0:
        raise EmptyOutfit("ta_isa requires at least one outfit image")
    if tau <= 0:
        raise ValueError("tau must be positive")
    v_t = normalize(target_text)
    mats = np.stack([normalize(v) for v in outfit], axis=0)
    sims = mats @ v_t
    weights = softmax(sims / tau)
    summed = weights @ mats
    return weights, normalize(summed)


def attribute_scores(
    attribute_embeddings: Mapping[str, np.ndarray],
    target_text: np.ndarray,
    visual: np.ndarray,
) -> dict[str, float]:
    """Mean alignment of each attribute vector with the target and visual cues."""
    if len(attribute_embeddings) == 0:
        raise EmptyAttributes("no attribute embeddings given")
    v_t = normalize(target_text)
    v_i = normalize(visual)
    scores: dict[str, float] = {}
    for name, vec in attribute_embeddings.items():
        a = normalize(vec)
        scores[name] = float((a @ v_t + a @ v_i) / 2.0)
    return scores


def aggregate_attributes(
    attribute_embeddings: Mapping[str, np.ndarray],
    scores: Mapping[str, float],
    sign: int = 1,
) -> tuple[dict[str, float], np.ndarray]:
    """Exp-weighted unit aggregate of attribute vectors.

    Weight for attribute ``i`` is ``exp(sign * score_i)``; the normalized
    weights are returned for diagnostics. Shift-invariant in the scores.
    """
    if len(attribute_embeddings) == 0:
        raise EmptyAttributes("no attribute embeddings given")
    names = list(attribute_embeddings.keys())
    logits = np.array([sign * float(scores[name]) for name in names], dtype=np.float64)
    weights = softmax(logits)
    mats = np.stack([normalize(attribute_embeddings[name]) for name in names], axis=0)
    aggregate = weights @ mats
    return {name: float(w) for name, w in zip(names, weights)}, normalize(aggregate)


def aa_va(
    attribute_embeddings: Mapping[str, np.ndarray],
    target_text: np.ndarray,
    visual: np.ndarray,
    sign: int = 1,
) -> tuple[dict[str, float], dict[str, float], np.ndarray]:
    """Adaptive attribute aggregation.

    Returns ``(scores, weights, aesthetic)``: per-attribute alignment
    scores, the normalized exp weights, and the unit aggregate vector.
    """
    scores = attribute_scores(attribute_embeddings, target_text, visual)
    weights, aggregate = aggregate_attributes(attribute_embeddings, scores, sign)
    return scores, weights, aggregate


def entropy_of_distribution(
    similarities: Sequence[float] | np.ndarray,
) -> tuple[np.ndarray, float]:
    """Softmax distribution over similarities and its Shannon entropy in nats."""
    sims = np.asarray(similarities, dtype=np.float64)
    if sims.size == 0:
        raise EmptyCandidates("entropy needs at least one candidate similarity")
    if not np.all(np.isfinite(sims)):
        raise ValueError("similarities contain NaN or Inf")
    p = softmax(sims)
    nonzero = p[p > 0]
    entropy = float(-np.sum(nonzero * np.log(nonzero)))
    return p, max(entropy, 0.0)


def de_gf(
    cues: CueSet,
    candidate_embeddings: Sequence[np.ndarray],
    gate_temperature: float = 1.0,
    base_diagnostics: FusionDiagnostics | None = None,
) -> QueryVector:
    """Entropy-gated fusion of the present cues over a candidate pool.

    For each cue the candidate-similarity distribution's entropy ``H``
    yields a raw gate ``exp(-H)``; gates are normalized to sum 1 and the
    cues are convexly combined, then re-normalized.
    """
    if len(candidate_embeddings) == 0:
        raise EmptyCandidates("de_gf requires at least one candidate")
    cand = np.stack([normalize(c) for c in candidate_embeddings], axis=0)
    present = cues.present()

    diagnostics = base_diagnostics if base_diagnostics is not None else FusionDiagnostics()
    raw_gates: list[float] = []
    vectors: list[np.ndarray] = []
    for name, vec in present:
        unit = normalize(vec)
        sims = cand @ unit
        _, entropy = entropy_of_distribution(sims / gate_temperature)
        diagnostics.cue_entropies[name] = entropy
        raw_gates.append(float(np.exp(-entropy)))
        vectors.append(unit)

    total = float(np.sum(raw_gates))
    gates = [g / total for g in raw_gates]
    for (name, _), gate in zip(present, gates):
        diagnostics.gates[name] = gate

    fused = np.zeros_like(vectors[0])
    for gate, vec in zip(gates, vectors):
        fused = fused + gate * vec
    return QueryVector(q=normalize(fused), diagnostics=diagnostics)


def build_cues(
    outfit_embeddings: Sequence[np.ndarray],
    target_text_embedding: np.ndarray,
    attribute_embeddings: Mapping[str, np.ndarray] | None,
    config: FusionConfig,
) -> tuple[CueSet, FusionDiagnostics]:
    """Run saliency and attribute aggregation; defer gating to ``de_gf``.

    Split out so callers that derive the candidate pool from the cues
    (category retrieval) can do so before gating.
    """
    diagnostics = FusionDiagnostics()
    v_t = normalize(target_text_embedding)
    weights, visual = ta_isa(v_t, outfit_embeddings, tau=config.tau)
    diagnostics.saliency_weights = [float(w) for w in weights]

    aesthetic = None
    if attribute_embeddings:
        scores, attr_weights, aesthetic = aa_va(
            attribute_embeddings, v_t, visual, sign=config.aava_sign
        )
        diagnostics.attribute_scores = scores
        diagnostics.attribute_weights = attr_weights

    return CueSet(text=v_t, visual=visual, aesthetic=aesthetic), diagnostics


def build_query(
    outfit_embeddings: Sequence[np.ndarray],
    target_text_embedding: np.ndarray,
    attribute_embeddings: Mapping[str, np.ndarray] | None,
    candidate_pool: Sequence[np.ndarray],
    config: FusionConfig | None = None,
) -> QueryVector:
    """Full query construction over a known candidate pool.

    With fusion disabled (``svaf_enabled=False``) the query is the
    normalized target-text embedding and the diagnostics are empty: the
    ablation contract for runs without the fusion stage.
    """
    config = config if config is not None else FusionConfig()
    if not config.svaf_enabled:
        return QueryVector(
            q=normalize(target_text_embedding),
            diagnostics=FusionDiagnostics.empty(),
        )
    cues, diagnostics = build_cues(
        outfit_embeddings, target_text_embedding, attribute_embeddings, config
    )
    return de_gf(
        cues,
        candidate_pool,
        gate_temperature=config.gate_temperature,
        base_diagnostics=diagnostics,
    )
