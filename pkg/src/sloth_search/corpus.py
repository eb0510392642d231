"""Synthetic desk-scale corpus generator.

Writes keyframe PNGs (colored rectangles on colored backgrounds), matching
bounding boxes and concept annotations, a manifest, and a ground-truth file.
One frame per video is "planted": its rectangle snaps to the 16x16 grid and
its caption carries unique marker words, so a query built from the recorded
ground truth must rank it highly. Everything is deterministic under a seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .manifest import KeyframeRecord, record_to_json
from .masks import GRID, MASK_BITS, PALETTE, PALETTE_INDEX, OBJECT_LABELS, BoundingBox, ColorMaskSet
from .textindex import ConceptAnnotations

IMAGE_SIZE = 128  # divisible by GRID so planted rectangles cover whole cells

SCENES = ("street", "office", "beach", "forest", "kitchen", "park", "stadium", "harbor")
DISTRACTOR_LABELS = ("dog", "cat", "bicycle", "boat")  # annotated but never spatially indexed

MANIFEST_NAME = "manifest.jsonl"
GROUND_TRUTH_NAME = "ground_truth.jsonl"
IMAGES_DIR = "images"


@dataclass(frozen=True)
class PlantedTarget:
    keyframe_id: str
    video_id: str
    caption_query: str
    background: str  # palette color name
    rect_color: str
    rect: tuple[float, float, float, float]  # normalized, grid-aligned
    box_label: str


@dataclass(frozen=True)
class CorpusSummary:
    out_dir: str
    manifest_path: str
    records: int
    videos: int
    planted: tuple[PlantedTarget, ...]


def planted_color_query(target: PlantedTarget) -> ColorMaskSet:
    """Reconstruct the sketch a user would draw from the planted layout."""
    labels = np.full(MASK_BITS, PALETTE_INDEX[target.background], dtype=np.int64)
    x0, y0, x1, y1 = target.rect
    c0, c1 = int(x0 * GRID), int(x1 * GRID)
    r0, r1 = int(y0 * GRID), int(y1 * GRID)
    grid = labels.reshape(GRID, GRID)
    grid[r0:r1, c0:c1] = PALETTE_INDEX[target.rect_color]
    return ColorMaskSet.from_cell_labels(labels)


def load_ground_truth(path) -> list[PlantedTarget]:
    targets = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        targets.append(
            PlantedTarget(
                keyframe_id=obj["keyframe_id"],
                video_id=obj["video_id"],
                caption_query=obj["caption_query"],
                background=obj["background"],
                rect_color=obj["rect_color"],
                rect=tuple(obj["rect"]),
                box_label=obj["box_label"],
            )
        )
    return targets


def _marker_word(rng: np.random.Generator, used: set[str]) -> str:
    while True:
        word = "".join(chr(97 + int(c)) for c in rng.integers(0, 26, size=6))
        if word not in used:
            used.add(word)
            return word


def _other_color(rng: np.random.Generator, exclude: int) -> int:
    choices = [i for i in range(len(PALETTE)) if i != exclude]
    return choices[int(rng.integers(len(choices)))]


def _caption(rng: np.random.Generator, labels: list[str], scene: str) -> str:
    a = labels[0] if labels else "shape"
    b = labels[-1] if labels else "shape"
    templates = (
        f"a {a} and a {b} near the {scene}",
        f"the {a} stands by a {b} in the {scene}",
        f"a {a} seen at the {scene}",
    )
    return templates[int(rng.integers(len(templates)))]


def _random_frame(rng, keyframe_id, video_id, frame_index, image_dir):
    size = IMAGE_SIZE
    bg = int(rng.integers(len(PALETTE)))
    pixels = np.full((size, size, 3), PALETTE[bg].anchor, dtype=np.uint8)

    boxes = []
    object_labels = []
    for _ in range(1 + int(rng.integers(3))):
        color = _other_color(rng, bg)
        x0 = float(rng.uniform(0.0, 0.75))
        y0 = float(rng.uniform(0.0, 0.75))
        x1 = x0 + float(rng.uniform(0.15, 1.0 - x0))
        y1 = y0 + float(rng.uniform(0.15, 1.0 - y0))
        px0, px1 = round(x0 * size), round(x1 * size)
        py0, py1 = round(y0 * size), round(y1 * size)
        pixels[py0:py1, px0:px1] = PALETTE[color].anchor
        if rng.uniform() < 0.85:
            label = OBJECT_LABELS[int(rng.integers(len(OBJECT_LABELS)))]
        else:
            label = DISTRACTOR_LABELS[int(rng.integers(len(DISTRACTOR_LABELS)))]
        boxes.append(BoundingBox(label, x0, y0, x1, y1))
        object_labels.append(label)

    scene = SCENES[int(rng.integers(len(SCENES)))]
    annotations = ConceptAnnotations(
        objects=tuple((label, round(float(rng.uniform(0.5, 1.0)), 3)) for label in object_labels),
        scenes=((scene, round(float(rng.uniform(0.5, 1.0)), 3)),),
        caption=_caption(rng, object_labels, scene),
    )
    image_rel = f"{IMAGES_DIR}/{keyframe_id}.png"
    Image.fromarray(pixels).save(image_dir / f"{keyframe_id}.png")
    return KeyframeRecord(keyframe_id, video_id, frame_index, image_rel, annotations, tuple(boxes))


def _planted_frame(rng, keyframe_id, video_id, frame_index, image_dir, used_markers):
    size = IMAGE_SIZE
    cell = size // GRID
    bg = int(rng.integers(len(PALETTE)))
    color = _other_color(rng, bg)
    gx0 = int(rng.integers(0, GRID - 4))
    gy0 = int(rng.integers(0, GRID - 4))
    gx1 = gx0 + int(rng.integers(3, GRID - gx0 + 1))
    gy1 = gy0 + int(rng.integers(3, GRID - gy0 + 1))
    rect = (gx0 / GRID, gy0 / GRID, gx1 / GRID, gy1 / GRID)

    pixels = np.full((size, size, 3), PALETTE[bg].anchor, dtype=np.uint8)
    pixels[gy0 * cell : gy1 * cell, gx0 * cell : gx1 * cell] = PALETTE[color].anchor
    image_rel = f"{IMAGES_DIR}/{keyframe_id}.png"
    Image.fromarray(pixels).save(image_dir / f"{keyframe_id}.png")

    box_label = OBJECT_LABELS[int(rng.integers(len(OBJECT_LABELS)))]
    scene = SCENES[int(rng.integers(len(SCENES)))]
    marker = f"{_marker_word(rng, used_markers)} {_marker_word(rng, used_markers)}"
    annotations = ConceptAnnotations(
        objects=((box_label, round(float(rng.uniform(0.5, 1.0)), 3)),),
        scenes=((scene, round(float(rng.uniform(0.5, 1.0)), 3)),),
        caption=f"a {box_label} on a plain {PALETTE[bg].name} backdrop {marker}",
    )
    record = KeyframeRecord(
        keyframe_id,
        video_id,
        frame_index,
        image_rel,
        annotations,
        (BoundingBox(box_label, *rect),),
    )
    target = PlantedTarget(
        keyframe_id=keyframe_id,
        video_id=video_id,
        caption_query=marker,
        background=PALETTE[bg].name,
        rect_color=PALETTE[color].name,
        rect=rect,
        box_label=box_label,
    )
    return record, target


def generate_corpus(out_dir, videos: int, frames_per_video: int, seed: int = 0) -> CorpusSummary:
    out = Path(out_dir)
    image_dir = out / IMAGES_DIR
    image_dir.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(seed)
    used_markers: set[str] = set()
    records: list[KeyframeRecord] = []
    planted: list[PlantedTarget] = []

    for vi in range(videos):
        video_id = f"v{vi:04d}"
        planted_frame = int(rng.integers(frames_per_video))
        for fi in range(frames_per_video):
            keyframe_id = f"{video_id}_f{fi:03d}"
            if fi == planted_frame:
                record, target = _planted_frame(rng, keyframe_id, video_id, fi, image_dir, used_markers)
                planted.append(target)
            else:
                record = _random_frame(rng, keyframe_id, video_id, fi, image_dir)
            records.append(record)

    manifest_path = out / MANIFEST_NAME
    with manifest_path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_json(record)) + "\n")

    with (out / GROUND_TRUTH_NAME).open("w", encoding="utf-8") as fh:
        for target in planted:
            fh.write(
                json.dumps(
                    {
                        "keyframe_id": target.keyframe_id,
                        "video_id": target.video_id,
                        "caption_query": target.caption_query,
                        "background": target.background,
                        "rect_color": target.rect_color,
                        "rect": list(target.rect),
                        "box_label": target.box_label,
                    }
                )
                + "\n"
            )

    return CorpusSummary(
        out_dir=str(out),
        manifest_path=str(manifest_path),
        records=len(records),
        videos=videos,
        planted=tuple(planted),
    )
