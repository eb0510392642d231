#!/usr/bin/env python3
"""Regenerate the sketch-encoding fixtures shared with the browser client.

The engine's packed mask layout is the wire contract; these fixtures pin the
client-side encoder to it byte for byte. Run from the repository root:

    python3 scripts/gen_sketch_fixtures.py
"""

import base64
import json
from pathlib import Path

import numpy as np

from sloth_search.masks import (
    GRID,
    MASK_BITS,
    OBJECT_LABELS,
    PALETTE_INDEX,
    BoundingBox,
    ColorMaskSet,
    rasterize_object_masks,
)

FIXTURE_PATH = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures" / "sketch_fixtures.json"

GRAY = PALETTE_INDEX["gray"]


def encode_case(cells, boxes):
    """cells: [(cell index, palette index)]; boxes: list of BoundingBox."""
    if cells:
        labels = np.full(MASK_BITS, GRAY, dtype=np.int64)
        for idx, color in cells:
            labels[idx] = color
        color_b64 = base64.b64encode(ColorMaskSet.from_cell_labels(labels).to_bytes()).decode()
    else:
        color_b64 = None
    if boxes:
        object_b64 = base64.b64encode(rasterize_object_masks(boxes).to_bytes()).decode()
    else:
        object_b64 = None
    return color_b64, object_b64


def build_cases():
    cases = []

    def add(name, cells, boxes):
        color_b64, object_b64 = encode_case(cells, boxes)
        cases.append(
            {
                "name": name,
                "cells": [[int(i), int(c)] for i, c in cells],
                "boxes": [
                    {"label": b.label, "x0": b.x0, "y0": b.y0, "x1": b.x1, "y1": b.y1}
                    for b in boxes
                ],
                "color_mask_b64": color_b64,
                "object_mask_b64": object_b64,
            }
        )

    add("empty", [], [])
    add("single-red-corner", [(0, PALETTE_INDEX["red"])], [])
    add("full-green-grid", [(i, PALETTE_INDEX["green"]) for i in range(MASK_BITS)], [])
    add("person-full-frame", [], [BoundingBox("person", 0.0, 0.0, 1.0, 1.0)])
    add(
        "mixed",
        [(0, 0), (17, 3), (255, 5)],
        [BoundingBox("car", 0.25, 0.25, 0.75, 0.5), BoundingBox("tree", 0.0, 0.5, 0.125, 1.0)],
    )

    rng = np.random.default_rng(2718)
    for i in range(50):
        n_cells = int(rng.integers(0, 40))
        picked = rng.choice(MASK_BITS, size=n_cells, replace=False) if n_cells else []
        cells = [(int(idx), int(rng.integers(8))) for idx in picked]
        boxes = []
        for _ in range(int(rng.integers(0, 4))):
            x0, x1 = sorted(round(float(v), 4) for v in rng.uniform(0, 1, size=2))
            y0, y1 = sorted(round(float(v), 4) for v in rng.uniform(0, 1, size=2))
            if x1 <= x0 or y1 <= y0:
                continue
            label = OBJECT_LABELS[int(rng.integers(len(OBJECT_LABELS)))]
            boxes.append(BoundingBox(label, x0, y0, x1, y1))
        add(f"random-{i:02d}", cells, boxes)

    return cases


def main():
    payload = {
        "grid": GRID,
        "palette_size": 8,
        "gray_index": GRAY,
        "cases": build_cases(),
    }
    FIXTURE_PATH.parent.mkdir(parents=True, exist_ok=True)
    FIXTURE_PATH.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(payload['cases'])} cases to {FIXTURE_PATH}")


if __name__ == "__main__":
    main()
