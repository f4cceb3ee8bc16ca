"""Frozen golden cases: fusion and FITB scoring against the bundled vectors."""

import json

import numpy as np

from conftest import FIXTURES
from stylefuse.datastore.aemb import read_embeddings
from stylefuse.fusion import FusionConfig, build_query
from stylefuse.reasoning.records import ATTRIBUTES
from stylefuse.retrieval import score_fitb

import reference


def load_case(name):
    case_dir = FIXTURES / name
    case = json.loads((case_dir / "case.json").read_text())
    _, records = read_embeddings(case_dir / "vectors.aemb")
    return case, dict(records)


def test_fusion_case_01_matches_golden():
    case, vectors = load_case("fusion_case_01")
    outfit = [vectors[f"outfit_{k}"] for k in range(3)]
    attrs = {a: vectors[f"attr_{a}"] for a in ATTRIBUTES}
    cands = [vectors[f"cand_{k}"] for k in range(4)]
    result = build_query(
        outfit, vectors["target_text"], attrs, cands,
        FusionConfig(tau=case["tau"], aava_sign=case["sign"],
                     gate_temperature=case["gate_temperature"]),
    )
    assert reference.rel_error(list(result.q), case["expected_q"]) < 1e-5
    for name, gate in case["expected_gates"].items():
        assert abs(result.diagnostics.gates[name] - gate) < 1e-6
    for i, w in enumerate(case["expected_saliency"]):
        assert abs(result.diagnostics.saliency_weights[i] - w) < 1e-6
    for name, h in case["expected_entropies"].items():
        assert abs(result.diagnostics.cue_entropies[name] - h) < 1e-6


def test_fitb_case_01_matches_golden():
    case, vectors = load_case("fitb_case_01")
    candidates = [(cid, vectors[cid]) for cid in case["candidate_ids"]]
    scores, argmax = score_fitb(np.asarray(vectors["query"], dtype=np.float64), candidates)
    assert argmax == case["expected_argmax"]
    for got, want in zip(scores, case["expected_scores"]):
        assert abs(got - want) < 1e-6
