"""Harness behavior: aggregation, determinism, replay, null calibration."""

import json
import random

import numpy as np
import pytest

from conftest import FIXTURES
from stylefuse.config import EngineConfig, build_runtime, catalog_paths_from_dir
from stylefuse.datastore.manifest import (
    A100Question,
    FitbQuestion,
    load_a100_questions,
    load_cir_queries,
    load_fitb_questions,
)
from stylefuse.errors import MissingVoteShares
from stylefuse.evaluation.harness import (
    eval_a100,
    eval_cir,
    eval_fitb,
    run_ablation,
    standard_grid,
)
from stylefuse.evaluation.report import merge_reports, verify_report
from stylefuse.pipeline import PipelineConfig


@pytest.fixture(scope="module")
def fixture_runtime():
    manifest, embeddings = catalog_paths_from_dir(FIXTURES / "cat")
    config = EngineConfig(
        manifest_path=str(manifest),
        embedding_path=str(embeddings),
        cache_dir=str(FIXTURES / "cat" / "cache"),
        mode="replay",
    )
    return config, build_runtime(config)


def replay_pipeline():
    return PipelineConfig(replay=True)


def test_fixture_fitb_accuracy_hand_counted(fixture_runtime):
    _, runtime = fixture_runtime
    questions = load_fitb_questions(FIXTURES / "fitb.ldj")
    report = eval_fitb(questions, runtime, replay_pipeline())
    assert report.fitb_accuracy == 0.6
    assert sum(1 for q in report.questions if q["correct"]) == 3
    verify_report(report)


def test_fixture_replay_bit_identical_across_runs_and_parallelism(fixture_runtime):
    _, runtime = fixture_runtime
    fitb = load_fitb_questions(FIXTURES / "fitb.ldj")
    cir = load_cir_queries(FIXTURES / "cir.ldj")
    a100 = load_a100_questions(FIXTURES / "a100.ldj")

    outputs = set()
    for workers in (1, 8, 1):
        report = merge_reports(
            eval_fitb(fitb, runtime, replay_pipeline(), parallelism=workers),
            eval_cir(cir, runtime, replay_pipeline(), ks=(1, 3, 5), parallelism=workers),
            eval_a100(a100, runtime, replay_pipeline(), parallelism=workers),
        )
        outputs.add(report.to_json())
    assert len(outputs) == 1


def test_fixture_recall_monotonic_in_k(fixture_runtime):
    _, runtime = fixture_runtime
    cir = load_cir_queries(FIXTURES / "cir.ldj")
    report = eval_cir(cir, runtime, replay_pipeline(), ks=(1, 2, 3, 4, 5))
    values = [report.recall_at[k] for k in sorted(report.recall_at)]
    assert values == sorted(values)
    verify_report(report)


def test_fixture_a100_aggregates(fixture_runtime):
    _, runtime = fixture_runtime
    a100 = load_a100_questions(FIXTURES / "a100.ldj")
    report = eval_a100(a100, runtime, replay_pipeline())
    assert abs(report.lat_hard - 4 / 6) < 1e-12
    assert abs(report.lat_soft - 0.45) < 1e-9
    assert report.aat_total == 0.75
    assert report.aat_per_attribute == {"color": 1.0, "material": 1.0, "balance": 0.0}
    verify_report(report)


def test_a100_lat_without_vote_shares_rejected(fixture_runtime):
    _, runtime = fixture_runtime
    question = A100Question(
        question_id="x", test_kind="lat", outfit_item_ids=("top01",),
        candidate_item_ids=("sho01", "sho02"), answer_index=0, vote_shares=None,
    )
    with pytest.raises(MissingVoteShares):
        eval_a100([question], runtime, replay_pipeline())


def test_zero_lat_questions_leaves_fields_absent(fixture_runtime):
    _, runtime = fixture_runtime
    a100 = [q for q in load_a100_questions(FIXTURES / "a100.ldj") if q.test_kind == "aat"]
    report = eval_a100(a100, runtime, replay_pipeline())
    assert report.lat_hard is None and report.lat_soft is None
    assert report.aat_total is not None


def test_ablation_grid_on_fixture(fixture_runtime):
    _, runtime = fixture_runtime
    datasets = {
        "fitb": load_fitb_questions(FIXTURES / "fitb.ldj"),
        "a100": load_a100_questions(FIXTURES / "a100.ldj"),
    }
    result = run_ablation(standard_grid(replay_pipeline()), datasets, runtime)
    assert [row.label for row in result.rows] == ["full", "ide_off", "svaf_off", "svaf_aes_off"]
    table = result.format_table()
    for header in ("Ide.", "SVAF", "Aes.", "LATs", "mLATs", "AATs"):
        assert header in table

    svaf_off = result.rows[2].report
    for record in svaf_off.questions:
        assert record["diagnostics"]["gates"] == {}
        assert record["diagnostics"]["saliency_weights"] == []

    again = run_ablation(standard_grid(replay_pipeline()), datasets, runtime)
    assert again.to_jsonl() == result.to_jsonl()


def test_single_config_grid_equals_direct_run(fixture_runtime):
    _, runtime = fixture_runtime
    fitb = load_fitb_questions(FIXTURES / "fitb.ldj")
    grid = [("only", replay_pipeline())]
    result = run_ablation(grid, {"fitb": fitb}, runtime)
    direct = eval_fitb(fitb, runtime, replay_pipeline())
    assert result.rows[0].report.fitb_accuracy == direct.fitb_accuracy


def test_null_model_calibration_small(fixture_runtime):
    """Seeded random-choice chooser lands near 1/4 on synthetic questions."""
    _, runtime = fixture_runtime
    questions = [
        FitbQuestion(
            question_id=f"syn{i:05d}",
            outfit_item_ids=("top01",),
            candidate_item_ids=("c0", "c1", "c2", "c3"),
            answer_index=i % 4,
        )
        for i in range(2000)
    ]

    def null_chooser(question, runtime, config):
        rng = random.Random(f"null-seed:{question.question_id}")
        return [0.0, 0.0, 0.0, 0.0], rng.randrange(4), {}

    report = eval_fitb(questions, runtime, replay_pipeline(), chooser=null_chooser)
    assert abs(report.fitb_accuracy - 0.25) < 0.03
    verify_report(report)


def test_cir_unique_category_member_always_recalled(tmp_path):
    """A ground truth that is its category's only item hits at every K."""
    import httpx
    import numpy as np

    from stylefuse.datastore import aemb as aemb_mod
    from stylefuse.datastore.manifest import CirQuery
    from stylefuse.fusion import normalize
    from stylefuse.reasoning.client import MllmClient
    from stylefuse.reasoning.records import MllmConfig

    rng = np.random.default_rng(55)
    rows = []
    records = []
    for i, category in enumerate(["tops", "tops", "hats"]):
        item_id = f"u{i}"
        rows.append({"item_id": item_id, "category": category,
                     "description": f"item {i}", "image_ref": f"{item_id}.png"})
        records.append((item_id, normalize(rng.standard_normal(8)).astype(np.float32)))
        (tmp_path / f"{item_id}.png").write_bytes(b"\x89PNG" + item_id.encode())
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    aemb_mod.write_embeddings(records, tmp_path / "embeddings.aemb")

    config = EngineConfig(
        manifest_path=str(manifest), embedding_path=str(tmp_path / "embeddings.aemb"),
        cache_dir=str(tmp_path / "cache"), mode="live", embedder_dim=8,
    )
    runtime = build_runtime(config)

    def handler(request):
        payload = {"target_description": "a knit beanie",
                   "attributes": {}, "identification": "x"}
        return httpx.Response(
            200, json={"choices": [{"message": {"content": json.dumps(payload)}}]}
        )

    mllm = MllmConfig(endpoint="https://mock.invalid/v1")
    runtime.mllm = mllm
    runtime.mllm_client = MllmClient(mllm, transport=httpx.MockTransport(handler))

    query = CirQuery(query_id="q", outfit_item_ids=("u0",),
                     target_category="hats", ground_truth_item_id="u2")
    report = eval_cir([query], runtime, PipelineConfig(), ks=(1, 3, 5))
    assert report.recall_at == {1: 1.0, 3: 1.0, 5: 1.0}


def test_aligned_mock_reaches_perfect_scores(tmp_path):
    """Mock reasoning emitting each item's canonical description makes the
    target-text embedding equal that item's catalog embedding; the pipeline
    must then solve the fixture benchmark outright."""
    import httpx

    from stylefuse.reasoning.cache import TranscriptCache
    from stylefuse.reasoning.client import MllmClient
    from stylefuse.reasoning.records import MllmConfig

    manifest, embeddings = catalog_paths_from_dir(FIXTURES / "cat")
    config = EngineConfig(
        manifest_path=str(manifest),
        embedding_path=str(embeddings),
        cache_dir=str(tmp_path / "cache"),
        mode="live",
    )
    runtime = build_runtime(config)

    fitb = load_fitb_questions(FIXTURES / "fitb.ldj")
    cir = load_cir_queries(FIXTURES / "cir.ldj")

    # Identify the question by its first outfit image (unique per question).
    from pathlib import Path

    image_to_item = {}
    for item in runtime.catalog.items:
        image_to_item[Path(runtime.catalog.image_path(item)).read_bytes()] = item.item_id
    first_to_truth = {}
    for q in fitb:
        first_to_truth[q.outfit_item_ids[0]] = q.candidate_item_ids[q.answer_index]
    for q in cir:
        first_to_truth[q.outfit_item_ids[0]] = q.ground_truth_item_id
    descriptions = {i.item_id: i.description for i in runtime.catalog.items}

    import base64

    def handler(request):
        body = json.loads(request.content)
        parts = body["messages"][1]["content"]
        first = next(p for p in parts if p["type"] == "image_url")
        blob = base64.b64decode(first["image_url"]["url"].split(",", 1)[1])
        truth = first_to_truth[image_to_item[blob]]
        desc = descriptions[truth]
        response = {
            "identification": "aligned mock",
            "attributes": {
                name: {"keyword": desc, "reason": ""}
                for name in ("color", "style", "occasion", "season", "material", "balance")
            },
            "target_description": desc,
        }
        return httpx.Response(
            200, json={"choices": [{"message": {"content": json.dumps(response)}}]}
        )

    mllm = MllmConfig(endpoint="https://aligned.invalid/v1/chat/completions")
    runtime.mllm = mllm
    runtime.mllm_client = MllmClient(mllm, transport=httpx.MockTransport(handler))
    runtime.cache = TranscriptCache(tmp_path / "cache")

    pipeline = PipelineConfig(replay=False)
    fitb_report = eval_fitb(fitb, runtime, pipeline)
    assert fitb_report.fitb_accuracy == 1.0
    cir_report = eval_cir(cir, runtime, pipeline, ks=(1,))
    assert cir_report.recall_at[1] == 1.0
