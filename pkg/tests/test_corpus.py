import filecmp
import json
from pathlib import Path

import numpy as np

from sloth_search.corpus import (
    GROUND_TRUTH_NAME,
    generate_corpus,
    load_ground_truth,
    planted_color_query,
)
from sloth_search.ingest import load_image
from sloth_search.manifest import load_manifest
from sloth_search.masks import quantize_color_masks


def test_record_and_video_counts(tmp_path):
    summary = generate_corpus(tmp_path, videos=20, frames_per_video=10, seed=0)
    manifest = load_manifest(summary.manifest_path)
    assert summary.records == 200
    assert len(manifest.records) == 200
    assert len({r.video_id for r in manifest.records}) == 20
    assert len(summary.planted) == 20


def test_generated_boxes_satisfy_invariants(tmp_path):
    summary = generate_corpus(tmp_path, videos=5, frames_per_video=6, seed=2)
    manifest = load_manifest(summary.manifest_path)
    for rec in manifest.records:
        for box in rec.boxes:  # BoundingBox validates on construction
            assert 0.0 <= box.x0 < box.x1 <= 1.0
            assert 0.0 <= box.y0 < box.y1 <= 1.0


def test_planted_layout_matches_quantizer_exactly(tmp_path):
    # planted rectangles snap to the grid, so quantizing the rendered image
    # must reproduce the ideal layout mask bit for bit
    summary = generate_corpus(tmp_path, videos=4, frames_per_video=3, seed=7)
    manifest = load_manifest(summary.manifest_path)
    by_id = {r.keyframe_id: r for r in manifest.records}
    for target in summary.planted:
        image = load_image(Path(tmp_path) / by_id[target.keyframe_id].image_path)
        assert image is not None
        assert quantize_color_masks(image) == planted_color_query(target)


def test_ground_truth_file_round_trips(tmp_path):
    summary = generate_corpus(tmp_path, videos=3, frames_per_video=4, seed=1)
    targets = load_ground_truth(Path(tmp_path) / GROUND_TRUTH_NAME)
    assert tuple(targets) == summary.planted
    for target in targets:
        assert len(target.caption_query.split()) == 2


def test_generation_is_deterministic_under_seed(tmp_path):
    a = generate_corpus(tmp_path / "a", videos=3, frames_per_video=3, seed=42)
    b = generate_corpus(tmp_path / "b", videos=3, frames_per_video=3, seed=42)
    assert Path(a.manifest_path).read_bytes() == Path(b.manifest_path).read_bytes()
    assert (tmp_path / "a" / GROUND_TRUTH_NAME).read_bytes() == (
        tmp_path / "b" / GROUND_TRUTH_NAME
    ).read_bytes()
    images_a = sorted((tmp_path / "a" / "images").iterdir())
    images_b = sorted((tmp_path / "b" / "images").iterdir())
    assert [p.name for p in images_a] == [p.name for p in images_b]
    for pa, pb in zip(images_a, images_b):
        assert filecmp.cmp(pa, pb, shallow=False)


def test_markers_are_unique_across_planted_frames(tmp_path):
    summary = generate_corpus(tmp_path, videos=10, frames_per_video=4, seed=3)
    words = [w for t in summary.planted for w in t.caption_query.split()]
    assert len(words) == len(set(words))
