import filecmp
import json
from pathlib import Path

import pytest

from sloth_search.cli import main
from sloth_search.corpus import planted_color_query
from sloth_search.engine import SearchEngine
from sloth_search.ingest import INDEX_FILES, CHECKSUM_FILE


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    """gen-corpus + index, once for the module."""
    root = tmp_path_factory.mktemp("cli")
    corpus_dir = root / "corpus"
    index_dir = root / "index"
    assert main([
        "gen-corpus", "--out", str(corpus_dir), "--videos", "4", "--frames-per-video", "4",
        "--seed", "9",
    ]) == 0
    assert main([
        "index", "--manifest", str(corpus_dir / "manifest.jsonl"), "--images", str(corpus_dir),
        "--out", str(index_dir), "--seed", "9",
    ]) == 0
    return corpus_dir, index_dir


def test_gen_corpus_reports_counts(tmp_path, capsys):
    assert main([
        "gen-corpus", "--out", str(tmp_path / "c"), "--videos", "2", "--frames-per-video", "3",
    ]) == 0
    out = capsys.readouterr().out
    assert "records=6" in out and "videos=2" in out


def test_index_summary_line(built, tmp_path, capsys):
    corpus_dir, _ = built
    assert main([
        "index", "--manifest", str(corpus_dir / "manifest.jsonl"), "--images", str(corpus_dir),
        "--out", str(tmp_path / "idx"),
    ]) == 0
    out = capsys.readouterr().out
    assert "indexed=16 skipped=0" in out


def test_missing_manifest_exits_1(tmp_path, capsys):
    code = main([
        "index", "--manifest", str(tmp_path / "nope.jsonl"), "--images", str(tmp_path),
        "--out", str(tmp_path / "idx"),
    ])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_same_seed_builds_identical_directories(built, tmp_path):
    corpus_dir, index_dir = built
    other = tmp_path / "idx2"
    assert main([
        "index", "--manifest", str(corpus_dir / "manifest.jsonl"), "--images", str(corpus_dir),
        "--out", str(other), "--seed", "9",
    ]) == 0
    for name in (*INDEX_FILES, CHECKSUM_FILE):
        assert filecmp.cmp(index_dir / name, other / name, shallow=False), name


def test_query_matches_engine_ordering(built, capsys):
    _, index_dir = built
    assert main([
        "query", "--index", str(index_dir), "--text", "person", "--weights", "1,0,0",
        "--limit", "10",
    ]) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    engine = SearchEngine.load(index_dir)
    from sloth_search.fusion import FusionWeights

    outcome = engine.search(text="person", weights=FusionWeights(1, 0, 0), limit=10)
    assert [l["keyframe_id"] for l in lines] == [h.keyframe for h in outcome.hits]


def test_query_without_modality_exits_2(built, capsys):
    _, index_dir = built
    assert main(["query", "--index", str(index_dir)]) == 2
    assert "error" in capsys.readouterr().err


def test_grouped_query_emits_group_headers(built, capsys):
    _, index_dir = built
    assert main([
        "query", "--index", str(index_dir), "--text", "person", "--mode", "grouped",
        "--limit", "20",
    ]) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    kinds = [l["type"] for l in lines]
    assert kinds[0] == "group"
    assert set(kinds) == {"group", "hit"}
    # every hit line follows its group header
    current = None
    for line in lines:
        if line["type"] == "group":
            current = line["video_id"]
        else:
            assert line["video_id"] == current


def test_query_with_mask_file(built, tmp_path, capsys):
    corpus_dir, index_dir = built
    from sloth_search.corpus import load_ground_truth

    target = load_ground_truth(corpus_dir / "ground_truth.jsonl")[0]
    mask_file = tmp_path / "q.mask"
    mask_file.write_bytes(planted_color_query(target).to_bytes())
    assert main([
        "query", "--index", str(index_dir), "--color-mask", str(mask_file),
        "--weights", "0,1,0", "--limit", "5",
    ]) == 0
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert lines[0]["keyframe_id"] == target.keyframe_id
    assert lines[0]["dist_c"] == 0.0


def test_eval_reports_and_is_seed_deterministic(built, capsys):
    _, index_dir = built
    assert main(["eval", "--index", str(index_dir), "--queries", "8", "--k", "3", "--seed", "5"]) == 0
    first = json.loads(capsys.readouterr().out)
    assert main(["eval", "--index", str(index_dir), "--queries", "8", "--k", "3", "--seed", "5"]) == 0
    second = json.loads(capsys.readouterr().out)
    first.pop("latency_ms")
    second.pop("latency_ms")
    assert first == second
    assert first["mean_recall"] == 1.0  # tiny corpus: fallback scan is exact


def test_env_var_supplies_index_dir(built, capsys, monkeypatch):
    _, index_dir = built
    monkeypatch.setenv("SLOTH_INDEX_DIR", str(index_dir))
    assert main(["query", "--text", "person", "--limit", "2"]) == 0
    assert capsys.readouterr().out.strip()
