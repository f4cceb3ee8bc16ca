#!/usr/bin/env python3
"""Regenerate everything under fixtures/ from scratch, deterministically.

Builds the 20-item synthetic catalog, the FITB/CIR/A100 question sets,
the frozen transcript cache (three prompt variants per question), the
fusion/fitb golden cases, and the golden recommend response.

Expected values are computed with the straight-line reference math in
tests/reference.py, never with the engine's own fusion path. Question
answer keys are pinned from those reference outcomes so the bundled
benchmark has known aggregate metrics (FITB accuracy 0.600, etc.).

Usage: python3 scripts/make_fixtures.py [--root fixtures]
"""

from __future__ import annotations

import argparse
import hashlib
import json
import shutil
import struct
import sys
import zlib
from pathlib import Path

import httpx

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "tests"))
sys.path.insert(0, str(REPO / "src"))

import reference  # noqa: E402
from stylefuse.datastore.aemb import write_embeddings  # noqa: E402
from stylefuse.embedder import HashingEmbedder  # noqa: E402
from stylefuse.reasoning.cache import TranscriptCache, reason_cached  # noqa: E402
from stylefuse.reasoning.client import MllmClient  # noqa: E402
from stylefuse.reasoning.records import ATTRIBUTES, MllmConfig, TaskInput  # noqa: E402

DIM = 64
MODEL = "gpt-4o"  # transcripts are synthetic; stored under the default
                  # model label so replay works without a config file
FIXED_TIME = "2025-01-01T00:00:00Z"
EMBEDDER = HashingEmbedder(dim=DIM, model_id="hash-v1")

ITEMS = [
    ("top01", "tops", "white cotton blouse with pearl buttons"),
    ("top02", "tops", "charcoal merino crewneck sweater"),
    ("top03", "tops", "navy striped breton long-sleeve tee"),
    ("top04", "tops", "olive utility shirt with chest pockets"),
    ("top05", "tops", "black silk camisole with lace trim"),
    ("bot01", "bottoms", "high-waisted indigo straight-leg jeans"),
    ("bot02", "bottoms", "camel pleated midi skirt"),
    ("bot03", "bottoms", "black tailored cigarette trousers"),
    ("bot04", "bottoms", "washed denim shorts with raw hem"),
    ("bot05", "bottoms", "grey wool wide-leg trousers"),
    ("sho01", "shoes", "black leather ankle boots with a low heel"),
    ("sho02", "shoes", "white low-top canvas sneakers"),
    ("sho03", "shoes", "tan suede loafers with stacked heel"),
    ("sho04", "shoes", "nude strappy block-heel sandals"),
    ("sho05", "shoes", "burgundy patent ballet flats"),
    ("acc01", "accessories", "gold pendant necklace with thin chain"),
    ("acc02", "accessories", "black quilted leather crossbody bag"),
    ("acc03", "accessories", "tortoiseshell cat-eye sunglasses"),
    ("acc04", "accessories", "camel cashmere scarf with fringe"),
    ("acc05", "accessories", "silver minimalist cuff bracelet"),
]
DESC = {item_id: desc for item_id, _, desc in ITEMS}

# question_id, outfit, candidates, intent ("aligned:<id>" or "novel:<text>"),
# planned-correct flag
FITB = [
    ("fq01", ["top01", "bot01"], ["sho01", "sho02", "sho03", "sho04"], "aligned:sho01", True),
    ("fq02", ["top02", "bot02"], ["sho02", "sho03", "sho04", "sho05"], "aligned:sho03", True),
    ("fq03", ["top03", "bot03"], ["acc01", "acc02", "acc03", "acc04"], "aligned:acc02", True),
    ("fq04", ["top04", "bot04"], ["sho01", "sho02", "sho04", "sho05"],
     "novel:bright yellow rubber rain boots with buckles", False),
    ("fq05", ["top05", "bot05"], ["acc01", "acc03", "acc04", "acc05"],
     "novel:chunky neon plastic statement earrings", False),
]

CIR = [
    ("cq01", ["bot01", "top01"], "shoes", "sho02", "aligned:sho02"),
    ("cq02", ["bot02", "top02"], "accessories", "acc04", "aligned:acc04"),
    ("cq03", ["bot03", "top03"], "shoes", "sho05", "aligned:sho05"),
    ("cq04", ["bot04", "top04"], "tops", "top05",
     "novel:cropped scarlet bomber jacket with ribbed cuffs"),
    ("cq05", ["bot05", "acc01"], "accessories", "acc03",
     "novel:woven straw tote bag with leather handles"),
]

# question_id, outfit, candidates, intent, planned-correct, kind, attribute_tag
A100 = [
    ("aq01", ["sho01", "top01"], ["bot01", "bot02", "bot03", "bot04"], "aligned:bot03", True, "lat", None),
    ("aq02", ["sho02", "top02"], ["bot02", "bot03", "bot04", "bot05"], "aligned:bot05", True, "lat", None),
    ("aq03", ["sho03", "top03"], ["acc01", "acc02", "acc03", "acc05"], "aligned:acc01", True, "lat", None),
    ("aq04", ["sho04", "top04"], ["bot01", "bot02", "bot04", "bot05"], "aligned:bot02", True, "lat", None),
    ("aq05", ["sho05", "top05"], ["acc02", "acc03", "acc04", "acc05"],
     "novel:oversized silver hoop earrings", False, "lat", None),
    ("aq06", ["acc01", "bot01"], ["top01", "top02", "top03", "top04"],
     "novel:pastel tie-dye oversized hoodie", False, "lat", None),
    ("aq07", ["acc02", "bot02"], ["top02", "top03", "top04", "top05"], "aligned:top05", True, "aat", "color"),
    ("aq08", ["acc03", "bot03"], ["sho01", "sho03", "sho04", "sho05"], "aligned:sho01", True, "aat", "color"),
    ("aq09", ["acc04", "bot04"], ["sho02", "sho03", "sho04", "sho05"], "aligned:sho02", True, "aat", "material"),
    ("aq10", ["acc05", "bot05"], ["top01", "top02", "top03", "top05"],
     "novel:distressed leather moto jacket", False, "aat", "balance"),
]

LAT_CHOSEN_SHARES = [0.6, 0.5, 0.7, 0.4, 0.2, 0.3]  # mean 0.45

KEYWORDS = {
    "color": ["muted neutrals", "warm earth tones", "monochrome black", "soft pastels",
              "navy and cream", "rich jewel tones"],
    "style": ["casual classic", "minimalist", "smart casual", "parisian chic",
              "utilitarian", "romantic"],
    "occasion": ["weekend brunch", "office day", "evening out", "city stroll",
                 "travel day", "dinner date"],
    "season": ["spring", "autumn", "summer", "winter", "late summer", "early spring"],
    "material": ["cotton and denim", "wool and leather", "silk and suede",
                 "linen blend", "knit and canvas", "cashmere"],
    "balance": ["fitted over relaxed", "long over cropped", "structured base",
                "soft drape", "clean lines", "layered volume"],
}


def thoughts_for(index: int) -> dict:
    return {
        name: {
            "keyword": KEYWORDS[name][index % len(KEYWORDS[name])],
            "reason": f"complements the {KEYWORDS[name][(index + 1) % len(KEYWORDS[name])]} "
                      f"direction of the outfit",
        }
        for name in ATTRIBUTES
    }


def target_text(intent: str) -> str:
    kind, _, value = intent.partition(":")
    return DESC[value] if kind == "aligned" else value


# --- tiny PNG writer (no imaging dependency, byte-stable forever) ----------

def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    return (
        struct.pack(">I", len(payload))
        + tag
        + payload
        + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF)
    )


def solid_png(item_id: str, size: int = 24) -> bytes:
    digest = hashlib.sha256(item_id.encode()).digest()
    r, g, b = digest[0], digest[1], digest[2]
    row = b"\x00" + bytes([r, g, b]) * size
    raw = row * size
    header = struct.pack(">IIBBBBB", size, size, 8, 2, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + _png_chunk(b"IHDR", header)
        + _png_chunk(b"IDAT", zlib.compress(raw, 9))
        + _png_chunk(b"IEND", b"")
    )


# --- reference-side pipeline helpers ---------------------------------------

def embed_text(text: str) -> list[float]:
    return [float(x) for x in EMBEDDER.embed_texts([text])[0]]


def item_vector_f32(item_id: str):
    import numpy as np

    raw = EMBEDDER.embed_texts([DESC[item_id]])[0]
    unit = raw / float(np.linalg.norm(raw))
    return unit.astype(np.float32)


def catalog_row(catalog_vectors: dict, item_id: str) -> list[float]:
    return [float(x) for x in catalog_vectors[item_id]]


def reference_query(catalog_vectors, outfit_ids, record_obj, candidate_vectors):
    """Reference build_query over explicit candidate vectors."""
    outfit = [catalog_row(catalog_vectors, i) for i in outfit_ids]
    v_t_raw = embed_text(record_obj["target_description"])
    attrs = {
        name: embed_text(f"{t['keyword']}. {t['reason']}")
        for name, t in record_obj.get("attributes", {}).items()
    }
    return reference.build_query(outfit, v_t_raw, attrs or None, candidate_vectors)


def reference_chosen(catalog_vectors, outfit_ids, candidate_ids, record_obj):
    cand_vectors = [catalog_row(catalog_vectors, i) for i in candidate_ids]
    q, _ = reference_query(catalog_vectors, outfit_ids, record_obj, cand_vectors)
    scores = [reference.dot(q, c) for c in cand_vectors]
    return min(range(len(candidate_ids)), key=lambda i: (-scores[i], candidate_ids[i]))


# --- transcript generation ---------------------------------------------------

VARIANTS = [
    ("full", True, True),
    ("ide_off", False, True),
    ("aes_off", True, False),
]


def response_for(index: int, intent: str, identify: bool, thoughts: bool) -> str:
    obj: dict = {}
    if identify:
        obj["identification"] = (
            "The outfit pairs the pictured garments into one coherent look; "
            "the missing piece should anchor it."
        )
    if thoughts:
        obj["attributes"] = thoughts_for(index)
    obj["target_description"] = target_text(intent)
    return json.dumps(obj, ensure_ascii=False)


def store_transcript(cache, cat_dir, outfit_ids, task, response_text):
    def handler(request):
        return httpx.Response(
            200, json={"choices": [{"message": {"content": response_text}}]}
        )

    config = MllmConfig(endpoint="https://fixture.invalid/v1/chat/completions",
                        model=MODEL, temperature=0.0)
    client = MllmClient(config, transport=httpx.MockTransport(handler))
    refs = [str(cat_dir / "images" / f"{i}.png") for i in outfit_ids]
    try:
        record = reason_cached(
            refs, task, config, cache, client=client,
            include_identify="identification" in response_text,
            include_thoughts='"attributes"' in response_text,
            now=FIXED_TIME,
        )
    finally:
        client.close()
    return record


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--root", default=str(REPO / "fixtures"))
    args = parser.parse_args()
    root = Path(args.root)
    if root.exists():
        shutil.rmtree(root)
    cat_dir = root / "cat"
    (cat_dir / "images").mkdir(parents=True)

    # 1. catalog ------------------------------------------------------------
    manifest_lines = []
    records = []
    catalog_vectors = {}
    for item_id, category, desc in ITEMS:
        manifest_lines.append(json.dumps({
            "item_id": item_id, "category": category,
            "description": desc, "image_ref": f"images/{item_id}.png",
        }))
        vec = item_vector_f32(item_id)
        records.append((item_id, vec))
        catalog_vectors[item_id] = vec
        (cat_dir / "images" / f"{item_id}.png").write_bytes(solid_png(item_id))
    (cat_dir / "manifest.jsonl").write_text("\n".join(manifest_lines) + "\n")
    write_embeddings(records, cat_dir / "embeddings.aemb")

    # 2. transcripts for every question and prompt variant --------------------
    cache = TranscriptCache(cat_dir / "cache")
    full_records: dict[str, dict] = {}
    all_questions = (
        [(qid, outfit, cands, intent) for qid, outfit, cands, intent, _ in FITB]
        + [(qid, outfit, None, intent) for qid, outfit, _, _, intent in CIR]
        + [(qid, outfit, cands, intent) for qid, outfit, cands, intent, _, _, _ in A100]
    )
    cir_by_qid = {qid: (cat, gt) for qid, _, cat, gt, _ in CIR}
    for index, (qid, outfit, cands, intent) in enumerate(all_questions):
        if qid in cir_by_qid:
            task = TaskInput(target_category=cir_by_qid[qid][0])
        else:
            refs = tuple(str(cat_dir / "images" / f"{c}.png") for c in cands)
            task = TaskInput(candidate_image_refs=refs)
        for _, identify, thoughts in VARIANTS:
            text = response_for(index, intent, identify, thoughts)
            record = store_transcript(cache, cat_dir, outfit, task, text)
        full_text = response_for(index, intent, True, True)
        full_records[qid] = json.loads(full_text)

    # 3. pin FITB / A100 answer keys from reference outcomes ------------------
    fitb_lines = []
    for qid, outfit, cands, intent, planned_correct in FITB:
        chosen = reference_chosen(catalog_vectors, outfit, cands, full_records[qid])
        answer = chosen if planned_correct else (chosen + 1) % len(cands)
        fitb_lines.append(json.dumps({
            "question_id": qid, "outfit_item_ids": outfit,
            "candidate_item_ids": cands, "answer_index": answer,
        }))
    (root / "fitb.ldj").write_text("\n".join(fitb_lines) + "\n")

    cir_lines = []
    for qid, outfit, category, gt, _ in CIR:
        cir_lines.append(json.dumps({
            "query_id": qid, "outfit_item_ids": outfit,
            "target_category": category, "ground_truth_item_id": gt,
        }))
    (root / "cir.ldj").write_text("\n".join(cir_lines) + "\n")

    a100_lines = []
    lat_index = 0
    for qid, outfit, cands, intent, planned_correct, kind, tag in A100:
        chosen = reference_chosen(catalog_vectors, outfit, cands, full_records[qid])
        answer = chosen if planned_correct else (chosen + 1) % len(cands)
        obj = {
            "question_id": qid, "test_kind": kind, "outfit_item_ids": outfit,
            "candidate_item_ids": cands, "answer_index": answer,
        }
        if kind == "lat":
            share = LAT_CHOSEN_SHARES[lat_index]
            lat_index += 1
            rest = (1.0 - share) / (len(cands) - 1)
            obj["vote_shares"] = [share if i == chosen else rest for i in range(len(cands))]
        else:
            obj["attribute_tag"] = tag
        a100_lines.append(json.dumps(obj))
    (root / "a100.ldj").write_text("\n".join(a100_lines) + "\n")

    # 4. fusion golden case ----------------------------------------------------
    import numpy as np

    case_dir = root / "fusion_case_01"
    case_dir.mkdir()
    rng = np.random.default_rng(20250101)
    dim = 16

    def unit_f32():
        v = rng.standard_normal(dim)
        return (v / np.linalg.norm(v)).astype(np.float32)

    names = (
        [f"outfit_{k}" for k in range(3)]
        + ["target_text"]
        + [f"attr_{a}" for a in ATTRIBUTES]
        + [f"cand_{k}" for k in range(4)]
    )
    vectors = {name: unit_f32() for name in names}
    write_embeddings(list(vectors.items()), case_dir / "vectors.aemb")
    as_list = {name: [float(x) for x in vec] for name, vec in vectors.items()}
    q, diag = reference.build_query(
        [as_list[f"outfit_{k}"] for k in range(3)],
        as_list["target_text"],
        {a: as_list[f"attr_{a}"] for a in ATTRIBUTES},
        [as_list[f"cand_{k}"] for k in range(4)],
        tau=0.01,
    )
    (case_dir / "case.json").write_text(json.dumps({
        "dim": dim, "tau": 0.01, "sign": 1, "gate_temperature": 1.0,
        "expected_q": q,
        "expected_gates": diag["gates"],
        "expected_saliency": diag["saliency_weights"],
        "expected_entropies": diag["cue_entropies"],
    }, indent=1))

    # 5. fitb golden case -------------------------------------------------------
    fitb_dir = root / "fitb_case_01"
    fitb_dir.mkdir()
    q_vec = unit_f32()
    cand_names = [f"cand_{k}" for k in range(4)]
    cand_vecs = {name: unit_f32() for name in cand_names}
    write_embeddings([("query", q_vec)] + list(cand_vecs.items()),
                     fitb_dir / "vectors.aemb")
    q_list = [float(x) for x in q_vec]
    scores = [reference.dot(q_list, [float(x) for x in cand_vecs[n]]) for n in cand_names]
    argmax = min(range(4), key=lambda i: (-scores[i], cand_names[i]))
    (fitb_dir / "case.json").write_text(json.dumps({
        "candidate_ids": cand_names, "expected_scores": scores,
        "expected_argmax": argmax,
    }, indent=1))

    # 6. golden recommend response ---------------------------------------------
    golden_dir = root / "golden"
    golden_dir.mkdir()
    request = {"outfit_item_ids": ["bot01", "top01"], "target_category": "shoes",
               "k": 5, "overrides": None}
    record_obj = full_records["cq01"]
    outfit_ids = request["outfit_item_ids"]

    shoes = sorted(i for i, c, _ in ITEMS if c == "shoes")
    outfit = [catalog_row(catalog_vectors, i) for i in outfit_ids]
    v_t_raw = embed_text(record_obj["target_description"])
    attrs = {name: embed_text(f"{t['keyword']}. {t['reason']}")
             for name, t in record_obj["attributes"].items()}
    saliency, visual = reference.ta_isa(v_t_raw, outfit, 0.01)
    v_t = reference.normalize(v_t_raw)
    scores_a, weights_a, aesthetic = reference.aa_va(attrs, v_t_raw, visual)
    cue_list = [("visual", visual), ("text", v_t), ("aesthetic", aesthetic)]
    mean_sims = {}
    for item_id in shoes:
        row = catalog_row(catalog_vectors, item_id)
        sims = [reference.dot(reference.normalize(vec), row) for _, vec in cue_list]
        mean_sims[item_id] = sum(sims) / len(sims)
    pool_ids = sorted(shoes, key=lambda i: (-mean_sims[i], i))[:100]
    pool_vecs = [catalog_row(catalog_vectors, i) for i in pool_ids]
    q, entropies, gates = reference.de_gf(cue_list, pool_vecs)
    ranked = sorted(
        ((i, reference.dot(q, catalog_row(catalog_vectors, i))) for i in shoes),
        key=lambda pair: (-pair[1], pair[0]),
    )[: request["k"]]

    pipeline_obj = {
        "identify_step": True, "svaf_enabled": True, "aesthetic_thoughts": True,
        "tau": 0.01, "aava_sign": 1, "gate_temperature": 1.0, "pool_size": 100,
        "model": None, "replay": True,
    }
    canonical = json.dumps(
        {"kind": "recommend", "payload": request, "config": pipeline_obj},
        sort_keys=True,
    )
    request_id = hashlib.sha256(canonical.encode()).hexdigest()[:24]
    category_of = {i: c for i, c, _ in ITEMS}
    golden = {
        "request_id": request_id,
        "items": [
            {"item_id": i, "score": s, "image_ref": f"images/{i}.png",
             "category": category_of[i]}
            for i, s in ranked
        ],
        "explanation": {
            "identification": record_obj["identification"],
            "target_description": record_obj["target_description"],
            "attributes": {k: record_obj["attributes"][k]
                           for k in sorted(record_obj["attributes"])},
        },
        "diagnostics": {
            "saliency_weights": saliency,
            "attribute_scores": scores_a,
            "attribute_weights": weights_a,
            "cue_entropies": entropies,
            "gates": gates,
        },
    }
    (golden_dir / "recommend_case_01.request.json").write_text(json.dumps(request, indent=1))
    (golden_dir / "recommend_case_01.json").write_text(json.dumps(golden, indent=1))

    # extra transcript so the demo flow (add rank-1, re-query) replays too
    grown = outfit_ids + [ranked[0][0]]
    store_transcript(
        cache, cat_dir, grown, TaskInput(target_category="shoes"),
        response_for(99, "novel:polished black derby shoes with leather soles", True, True),
    )

    # 7. bad manifest for validation tests --------------------------------------
    (root / "bad_manifest.jsonl").write_text("\n".join([
        json.dumps({"item_id": "dup01", "category": "tops",
                    "description": "first", "image_ref": "images/a.png"}),
        json.dumps({"item_id": "dup01", "category": "tops",
                    "description": "second", "image_ref": "images/b.png"}),
    ]) + "\n")

    # 8. replay service config ----------------------------------------------------
    (root / "replay.config.json").write_text(json.dumps({
        "catalog": {"manifest": "cat/manifest.jsonl",
                    "embeddings": "cat/embeddings.aemb"},
        "cache_dir": "cat/cache",
        "mode": "replay",
        "embedder": {"kind": "hash", "model": "hash-v1"},
        "service": {"ui_origin": "http://localhost:5173"},
    }, indent=1))

    transcripts = len(list((cat_dir / "cache" / "reasoning").glob("*.record")))
    print(f"fixtures written to {root} ({transcripts} transcripts)")


if __name__ == "__main__":
    main()
