"""Sidecar contracts: export round-trips, HTTP endpoints, engine compatibility."""

import base64
import hashlib
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from embed_sidecar import aemb
from embed_sidecar.app import create_app
from embed_sidecar.encoders import HashEncoder, load_encoder
from embed_sidecar.export import export_catalog

REPO = Path(__file__).resolve().parent.parent.parent
FIXTURE_CAT = REPO / "fixtures" / "cat"


@pytest.fixture
def small_catalog(tmp_path):
    """Ten tiny PNG stubs plus a matching manifest."""
    image_dir = tmp_path / "images"
    image_dir.mkdir()
    lines = []
    for i in range(10):
        item_id = f"item{i:02d}"
        (image_dir / f"{item_id}.png").write_bytes(
            b"\x89PNG\r\n\x1a\n" + hashlib.sha256(item_id.encode()).digest()
        )
        lines.append(json.dumps({
            "item_id": item_id, "category": "tops",
            "description": f"fixture item {i}", "image_ref": f"images/{item_id}.png",
        }))
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text("\n".join(lines) + "\n")
    return tmp_path, manifest


def test_export_round_trip_and_engine_load(small_catalog, tmp_path):
    root, manifest = small_catalog
    out = tmp_path / "out.aemb"
    report = export_catalog(root, manifest, out, HashEncoder(dim=64))
    assert report.exported == 10
    assert report.failures == []

    # the engine (consumed through its CLI, not imports) loads with zero warnings
    result = subprocess.run(
        [sys.executable, "-m", "stylefuse", "ingest", "validate",
         "--embeddings", str(out)],
        capture_output=True, text=True, cwd=REPO,
    )
    assert result.returncode == 0, result.stderr
    assert "embeddings ok: 10 vectors" in result.stdout
    assert "warning" not in result.stderr.lower()

    # bitwise payload equality on re-export
    dim, records = aemb.read(out)
    assert dim == 64
    again = tmp_path / "again.aemb"
    aemb.write(records, again)
    assert again.read_bytes() == out.read_bytes()


def test_export_rerun_bitwise_identical(small_catalog, tmp_path):
    root, manifest = small_catalog
    first = tmp_path / "first.aemb"
    second = tmp_path / "second.aemb"
    export_catalog(root, manifest, first, HashEncoder(dim=32))
    export_catalog(root, manifest, second, HashEncoder(dim=32))
    assert first.read_bytes() == second.read_bytes()


def test_export_excludes_corrupt_image_with_report(small_catalog, tmp_path):
    root, manifest = small_catalog
    (root / "images" / "item03.png").write_bytes(b"not an image at all")
    out = tmp_path / "out.aemb"
    report = export_catalog(root, manifest, out, HashEncoder(dim=16))
    assert report.exported == 9
    assert [f["item_id"] for f in report.failures] == ["item03"]
    _, records = aemb.read(out)
    assert all(item_id != "item03" for item_id, _ in records)


def test_export_fatal_on_zero_successes(tmp_path):
    manifest = tmp_path / "m.jsonl"
    manifest.write_text(json.dumps({
        "item_id": "a", "category": "x", "description": "",
        "image_ref": "missing.png",
    }) + "\n")
    with pytest.raises(RuntimeError):
        export_catalog(tmp_path, manifest, tmp_path / "out.aemb", HashEncoder(dim=8))


def test_export_rows_are_unit_norm(small_catalog, tmp_path):
    root, manifest = small_catalog
    out = tmp_path / "unit.aemb"
    export_catalog(root, manifest, out, HashEncoder(dim=48))
    _, records = aemb.read(out)
    for _, vec in records:
        assert abs(float(np.linalg.norm(vec.astype(np.float64))) - 1.0) < 1e-4


def test_export_optional_text_embeddings(small_catalog, tmp_path):
    root, manifest = small_catalog
    out = tmp_path / "img.aemb"
    texts = tmp_path / "txt.aemb"
    export_catalog(root, manifest, out, HashEncoder(dim=16), texts_output_path=texts)
    dim, records = aemb.read(texts)
    assert dim == 16 and len(records) == 10


# --- HTTP service ---------------------------------------------------------

@pytest.fixture
def client():
    return TestClient(create_app(HashEncoder(dim=32)))


def test_health_reports_model_and_dim(client):
    body = client.get("/health").json()
    assert body == {"status": "ok", "model": "hash-v1", "dim": 32}


def test_text_determinism_and_order(client):
    first = client.post("/embed/text", json={"texts": ["blue shirt", "red skirt"]}).json()
    second = client.post("/embed/text", json={"texts": ["blue shirt", "red skirt"]}).json()
    assert first["vectors"] == second["vectors"]
    assert len(first["vectors"]) == 2
    solo = client.post("/embed/text", json={"texts": ["red skirt"]}).json()
    assert solo["vectors"][0] == first["vectors"][1]


def test_empty_text_rejected(client):
    response = client.post("/embed/text", json={"texts": ["  "]})
    assert response.status_code == 400
    assert response.json()["code"] == "empty_text"


def test_oversized_batch_rejected(client):
    response = client.post("/embed/text", json={"texts": ["x"] * 65})
    assert response.status_code == 413


def test_embed_image_endpoint(client):
    blob = base64.b64encode(b"\x89PNG\r\n\x1a\nimagebytes").decode()
    body = client.post("/embed/image", json={"images": [blob]}).json()
    assert len(body["vectors"]) == 1
    assert len(body["vectors"][0]) == 32


def test_bad_base64_rejected(client):
    response = client.post("/embed/image", json={"images": ["%%%not-base64%%%"]})
    assert response.status_code == 400


def test_loading_state_returns_503():
    app = create_app(None)
    with TestClient(app) as client:
        assert client.get("/health").status_code == 503
        assert client.post("/embed/text", json={"texts": ["x"]}).status_code == 503
    app.state.set_encoder(HashEncoder(dim=8))
    with TestClient(app) as client:
        assert client.get("/health").status_code == 200


def test_load_encoder_specs():
    encoder = load_encoder("hash:128")
    assert encoder.dim == 128
    with pytest.raises(ValueError):
        load_encoder("nonsense:1")


def test_engine_http_client_speaks_this_wire_format():
    """The engine's embedder client, over real TCP to this app, round-trips."""
    import socket
    import threading
    import time

    import uvicorn

    from stylefuse.embedder import HttpEmbedder

    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        port = sock.getsockname()[1]

    app = create_app(HashEncoder(dim=24))
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port,
                                           log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        deadline = time.monotonic() + 10
        while not server.started:
            assert time.monotonic() < deadline, "sidecar server failed to start"
            time.sleep(0.05)
        embedder = HttpEmbedder(f"http://127.0.0.1:{port}", dim=24)
        matrix = embedder.embed_texts(["a linen shirt", "wool trousers"])
        assert matrix.shape == (2, 24)
        assert embedder.healthy()
        embedder.close()
    finally:
        server.should_exit = True
        thread.join(timeout=5)


def test_engine_consumes_exported_catalog(small_catalog, tmp_path):
    """Full file-contract round trip: sidecar export, engine catalog load."""
    root, manifest = small_catalog
    out = tmp_path / "cat.aemb"
    export_catalog(root, manifest, out, HashEncoder(dim=64))
    result = subprocess.run(
        [sys.executable, "-m", "stylefuse", "ingest", "validate",
         "--manifest", str(manifest), "--embeddings", str(out)],
        capture_output=True, text=True, cwd=REPO,
    )
    assert result.returncode == 0, result.stderr
    assert "catalog ok: 10 items joined" in result.stdout
