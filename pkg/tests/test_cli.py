"""CLI contract: subcommands, exit codes, determinism, help coverage."""

import json

import click.testing
import numpy as np
import pytest

from conftest import FIXTURES
from stylefuse.cli import cli, main


@pytest.fixture
def invoke(capsys):
    def run(*argv):
        code = main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run


def test_eval_fitb_fixture_prints_hand_counted_accuracy(invoke):
    code, out, err = invoke(
        "eval", "fitb",
        "--questions", str(FIXTURES / "fitb.ldj"),
        "--catalog", str(FIXTURES / "cat"),
        "--replay",
    )
    assert code == 0, err
    assert "accuracy: 0.600" in out


def test_eval_fitb_machine_readable_out(invoke, tmp_path):
    out_path = tmp_path / "report.jsonl"
    code, _, _ = invoke(
        "eval", "fitb",
        "--questions", str(FIXTURES / "fitb.ldj"),
        "--catalog", str(FIXTURES / "cat"),
        "--replay", "--out", str(out_path),
    )
    assert code == 0
    lines = out_path.read_text().splitlines()
    summary = json.loads(lines[0])
    assert summary["fitb_accuracy"] == 0.6
    assert len(lines) == 1 + 5

    again = tmp_path / "again.jsonl"
    invoke("eval", "fitb", "--questions", str(FIXTURES / "fitb.ldj"),
           "--catalog", str(FIXTURES / "cat"), "--replay", "--out", str(again))
    assert again.read_bytes() == out_path.read_bytes()


def test_ingest_validate_duplicate_id_exit_1(invoke):
    code, out, err = invoke(
        "ingest", "validate", "--manifest", str(FIXTURES / "bad_manifest.jsonl")
    )
    assert code == 1
    assert "dup01" in err
    assert out == "" or "dup01" not in out  # errors on stderr only


def test_ingest_validate_fixture_catalog_ok(invoke):
    code, out, _ = invoke(
        "ingest", "validate",
        "--manifest", str(FIXTURES / "cat" / "manifest.jsonl"),
        "--embeddings", str(FIXTURES / "cat" / "embeddings.aemb"),
        "--fitb", str(FIXTURES / "fitb.ldj"),
        "--cir", str(FIXTURES / "cir.ldj"),
        "--a100", str(FIXTURES / "a100.ldj"),
    )
    assert code == 0
    assert "catalog ok: 20 items joined" in out


def test_serve_missing_config_exits_1_before_binding(invoke):
    code, _, err = invoke("serve", "--config", "missing.cfg")
    assert code == 1
    assert "missing.cfg" in err


def test_unknown_flag_rejected_exit_1(invoke):
    code, _, err = invoke("eval", "fitb", "--nonsense")
    assert code == 1
    assert "nonsense" in err.lower() or "no such option" in err.lower()


def test_replay_cache_miss_exit_3(invoke, tmp_path):
    questions = tmp_path / "new.ldj"
    questions.write_text(json.dumps({
        "question_id": "zz", "outfit_item_ids": ["acc05", "sho04"],
        "candidate_item_ids": ["top01", "top02"], "answer_index": 0,
    }) + "\n")
    code, _, err = invoke(
        "eval", "fitb", "--questions", str(questions),
        "--catalog", str(FIXTURES / "cat"), "--replay",
    )
    assert code == 3
    assert "replay" in err.lower()


def test_help_exits_zero(invoke):
    code, out, _ = invoke("--help")
    assert code == 0
    for name in ("ingest", "embed", "reason", "query", "eval", "ablate", "serve"):
        assert name in out


def walk_commands(group, prefix=()):
    yield prefix, group
    commands = getattr(group, "commands", {})
    for name, sub in commands.items():
        yield from walk_commands(sub, prefix + (name,))


def test_every_subcommand_help_documents_every_flag():
    runner = click.testing.CliRunner()
    for path, command in walk_commands(cli):
        result = runner.invoke(cli, [*path, "--help"])
        assert result.exit_code == 0, f"--help failed for {path}"
        for param in command.params:
            if param.param_type_name != "option":
                continue
            longest = max(param.opts, key=len)
            assert longest in result.output, f"{longest} undocumented in {path}"
            assert param.help, f"{longest} in {path} has no help text"


def test_embed_import_round_trip(invoke, tmp_path):
    rows = [{"item_id": f"v{i}", "values": [float(i), 1.0, 0.0]} for i in range(4)]
    src = tmp_path / "vectors.jsonl"
    src.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    out = tmp_path / "vectors.aemb"
    code, stdout, _ = invoke("embed", "import", "--input", str(src), "--output", str(out))
    assert code == 0
    from stylefuse.datastore.aemb import read_embeddings

    dim, records = read_embeddings(out)
    assert dim == 3 and len(records) == 4
    assert records[2][1].tolist() == [2.0, 1.0, 0.0]


def test_reason_command_replays_record(invoke):
    code, out, err = invoke(
        "reason", "--catalog", str(FIXTURES / "cat"), "--replay",
        "--outfit", "bot01,top01", "--category", "shoes",
    )
    assert code == 0, err
    record = json.loads(out)
    assert record["target_description"]
    assert record["model_id"] == "gpt-4o"


def test_query_command_prints_ranking_and_explanation(invoke):
    code, out, err = invoke(
        "query", "--catalog", str(FIXTURES / "cat"), "--replay",
        "--outfit", "bot01,top01", "--category", "shoes", "-k", "3",
    )
    assert code == 0, err
    body = json.loads(out)
    assert len(body["ranking"]) == 3
    assert body["ranking"][0]["item_id"] == "sho02"
    assert len(body["explanation"]["attributes"]) == 6


def test_ablate_emits_table_and_jsonl(invoke, tmp_path):
    out_path = tmp_path / "ablate.jsonl"
    code, out, err = invoke(
        "ablate", "--catalog", str(FIXTURES / "cat"), "--replay",
        "--a100", str(FIXTURES / "a100.ldj"), "--out", str(out_path),
    )
    assert code == 0, err
    assert "Ide." in out and "SVAF" in out and "Aes." in out
    lines = out_path.read_text().splitlines()
    assert len(lines) == 4
    labels = [json.loads(line)["label"] for line in lines]
    assert labels == ["full", "ide_off", "svaf_off", "svaf_aes_off"]
