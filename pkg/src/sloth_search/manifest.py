"""Line-delimited dataset manifests: one JSON record per keyframe.

Record schema per line:
{"keyframe_id": str, "video_id": str, "frame_index": int, "image": str,
 "objects": [{"label": str, "conf": num}], "scenes": [{"label": str, "conf": num}],
 "caption": str, "boxes": [{"label": str, "x0": num, "y0": num, "x1": num, "y1": num}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidInputError, ManifestError
from .masks import BoundingBox
from .textindex import ConceptAnnotations


@dataclass(frozen=True)
class KeyframeRecord:
    keyframe_id: str
    video_id: str
    frame_index: int
    image_path: str
    annotations: ConceptAnnotations
    boxes: tuple[BoundingBox, ...] = ()

    def __post_init__(self):
        if not self.keyframe_id:
            raise InvalidInputError("keyframe_id must be non-empty")
        if not self.video_id:
            raise InvalidInputError("video_id must be non-empty")
        if self.frame_index < 0:
            raise InvalidInputError("frame_index must be non-negative")


@dataclass(frozen=True)
class DatasetManifest:
    records: tuple[KeyframeRecord, ...]
    metadata: dict = field(default_factory=dict)


def record_from_json(obj: dict) -> KeyframeRecord:
    try:
        annotations = ConceptAnnotations(
            objects=tuple((o["label"], o["conf"]) for o in obj.get("objects", ())),
            scenes=tuple((s["label"], s["conf"]) for s in obj.get("scenes", ())),
            caption=str(obj.get("caption", "")),
        )
        boxes = tuple(
            BoundingBox(b["label"], float(b["x0"]), float(b["y0"]), float(b["x1"]), float(b["y1"]))
            for b in obj.get("boxes", ())
        )
        return KeyframeRecord(
            keyframe_id=str(obj["keyframe_id"]),
            video_id=str(obj["video_id"]),
            frame_index=int(obj["frame_index"]),
            image_path=str(obj["image"]),
            annotations=annotations,
            boxes=boxes,
        )
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"bad record field: {exc}") from exc


def record_to_json(record: KeyframeRecord) -> dict:
    return {
        "keyframe_id": record.keyframe_id,
        "video_id": record.video_id,
        "frame_index": record.frame_index,
        "image": record.image_path,
        "objects": [{"label": l, "conf": c} for l, c in record.annotations.objects],
        "scenes": [{"label": l, "conf": c} for l, c in record.annotations.scenes],
        "caption": record.annotations.caption,
        "boxes": [
            {"label": b.label, "x0": b.x0, "y0": b.y0, "x1": b.x1, "y1": b.y1}
            for b in record.boxes
        ],
    }


def load_manifest(path) -> DatasetManifest:
    """Parse and validate a whole manifest; any defect reports its line number."""
    path = Path(path)
    records: list[KeyframeRecord] = []
    seen_ids: dict[str, int] = {}
    seen_frames: dict[tuple[str, int], int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
            try:
                record = record_from_json(obj)
            except InvalidInputError as exc:
                raise ManifestError(f"{path}: line {lineno}: {exc}") from exc
            if record.keyframe_id in seen_ids:
                raise ManifestError(
                    f"{path}: line {lineno}: duplicate keyframe_id {record.keyframe_id!r} "
                    f"(first seen on line {seen_ids[record.keyframe_id]})"
                )
            key = (record.video_id, record.frame_index)
            if key in seen_frames:
                raise ManifestError(
                    f"{path}: line {lineno}: duplicate frame_index {record.frame_index} "
                    f"in video {record.video_id!r} (first seen on line {seen_frames[key]})"
                )
            seen_ids[record.keyframe_id] = lineno
            seen_frames[key] = lineno
            records.append(record)
    if not records:
        raise ManifestError(f"{path}: empty manifest")
    metadata = {
        "path": str(path),
        "records": len(records),
        "videos": len({r.video_id for r in records}),
    }
    return DatasetManifest(records=tuple(records), metadata=metadata)
