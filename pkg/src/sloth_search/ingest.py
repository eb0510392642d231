"""Indexing pipeline: manifest in, five structures out (text index, two
sketch indexes, feature store, video table), with checksummed directory
persistence.

Records with unreadable images still reach the text index; they are skipped
by the sketch indexes and counted, never fatal. Building is deterministic
for a fixed manifest and seed, so two runs serialize to identical bytes.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .binio import ByteReader, write_str, write_u32, write_u64
from .errors import ConflictError, StorageError
from .lsh import LshConfig, LshIndex
from .manifest import DatasetManifest
from .masks import (
    COLOR_BLOB_BYTES,
    COLOR_VECTOR_BITS,
    OBJECT_BLOB_BYTES,
    OBJECT_VECTOR_BITS,
    ColorMaskSet,
    ObjectMaskSet,
    quantize_color_masks,
    rasterize_object_masks,
)
from .textindex import TextIndex

logger = logging.getLogger(__name__)

_FEATURES_MAGIC = b"SFTR"
_VIDEOS_MAGIC = b"SVID"
_VERSION = 1

INDEX_FILES = ("text.idx", "color.lsh", "object.lsh", "features.bin", "videos.tbl")
CHECKSUM_FILE = "manifest.checksum"


class FeatureStore:
    """Packed mask vectors per keyframe, insertion-ordered."""

    def __init__(self):
        self._entries: dict[str, tuple[bytes, bytes]] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, keyframe_id: str) -> bool:
        return keyframe_id in self._entries

    def add(self, keyframe_id: str, colors: ColorMaskSet, objects: ObjectMaskSet) -> None:
        if keyframe_id in self._entries:
            raise ConflictError(f"duplicate keyframe id {keyframe_id!r}")
        self._entries[keyframe_id] = (colors.to_bytes(), objects.to_bytes())

    def color_vector(self, keyframe_id: str) -> np.ndarray | None:
        entry = self._entries.get(keyframe_id)
        if entry is None:
            return None
        return np.unpackbits(np.frombuffer(entry[0], dtype=np.uint8), bitorder="little").astype(bool)

    def object_vector(self, keyframe_id: str) -> np.ndarray | None:
        entry = self._entries.get(keyframe_id)
        if entry is None:
            return None
        return np.unpackbits(np.frombuffer(entry[1], dtype=np.uint8), bitorder="little").astype(bool)

    def keyframe_ids(self) -> list[str]:
        return list(self._entries)

    def to_bytes(self) -> bytes:
        buf = bytearray()
        buf += _FEATURES_MAGIC
        write_u32(buf, _VERSION)
        write_u64(buf, len(self._entries))
        for keyframe_id, (color_raw, object_raw) in self._entries.items():
            write_str(buf, keyframe_id)
            buf += color_raw
            buf += object_raw
        return bytes(buf)

    @classmethod
    def from_bytes(cls, data: bytes) -> "FeatureStore":
        r = ByteReader(data)
        if r.raw(4) != _FEATURES_MAGIC:
            raise StorageError("not a feature store file")
        version = r.u32()
        if version != _VERSION:
            raise StorageError(f"unsupported feature store version {version}")
        store = cls()
        count = r.u64()
        for _ in range(count):
            keyframe_id = r.str()
            color_raw = r.raw(COLOR_BLOB_BYTES)
            object_raw = r.raw(OBJECT_BLOB_BYTES)
            store._entries[keyframe_id] = (color_raw, object_raw)
        r.expect_eof()
        return store


class VideoTable:
    """Keyframe metadata plus frame-ordered keyframe lists per video."""

    def __init__(self, image_root: str = ""):
        self.image_root = image_root
        self._records: dict[str, tuple[str, int, str]] = {}  # kf -> (video, frame_index, image path)
        self._by_video: dict[str, list[str]] | None = None

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, keyframe_id: str) -> bool:
        return keyframe_id in self._records

    def add(self, keyframe_id: str, video_id: str, frame_index: int, image_path: str) -> None:
        if keyframe_id in self._records:
            raise ConflictError(f"duplicate keyframe id {keyframe_id!r}")
        self._records[keyframe_id] = (video_id, frame_index, image_path)
        self._by_video = None

    def video_of(self, keyframe_id: str) -> str:
        return self._records[keyframe_id][0]

    def frame_index(self, keyframe_id: str) -> int:
        return self._records[keyframe_id][1]

    def image_path(self, keyframe_id: str) -> Path:
        return Path(self.image_root) / self._records[keyframe_id][2]

    def _grouped(self) -> dict[str, list[str]]:
        if self._by_video is None:
            grouped: dict[str, list[str]] = {}
            for keyframe_id, (video_id, frame_index, _) in self._records.items():
                grouped.setdefault(video_id, []).append(keyframe_id)
            for members in grouped.values():
                members.sort(key=lambda kf: self._records[kf][1])  # ascending frame_index
            self._by_video = grouped
        return self._by_video

    def keyframes(self, video_id: str) -> list[str] | None:
        return self._grouped().get(video_id)

    def videos(self) -> list[str]:
        return list(self._grouped())

    def keyframe_ids(self) -> list[str]:
        return list(self._records)

    def to_bytes(self) -> bytes:
        buf = bytearray()
        buf += _VIDEOS_MAGIC
        write_u32(buf, _VERSION)
        write_str(buf, self.image_root)
        write_u64(buf, len(self._records))
        for keyframe_id, (video_id, frame_index, image_path) in self._records.items():
            write_str(buf, keyframe_id)
            write_str(buf, video_id)
            write_u32(buf, frame_index)
            write_str(buf, image_path)
        return bytes(buf)

    @classmethod
    def from_bytes(cls, data: bytes) -> "VideoTable":
        r = ByteReader(data)
        if r.raw(4) != _VIDEOS_MAGIC:
            raise StorageError("not a video table file")
        version = r.u32()
        if version != _VERSION:
            raise StorageError(f"unsupported video table version {version}")
        table = cls(image_root=r.str())
        count = r.u64()
        for _ in range(count):
            keyframe_id = r.str()
            video_id = r.str()
            frame_index = r.u32()
            image_path = r.str()
            table._records[keyframe_id] = (video_id, frame_index, image_path)
        r.expect_eof()
        return table


@dataclass
class IndexBundle:
    text: TextIndex
    color: LshIndex
    objects: LshIndex
    features: FeatureStore
    videos: VideoTable

    def skipped(self) -> list[str]:
        """Keyframes indexed for text only (image unreadable at ingest)."""
        return [kf for kf in self.videos.keyframe_ids() if kf not in self.features]

    @classmethod
    def empty(cls, seed: int = 0, image_root: str = "") -> "IndexBundle":
        return cls(
            text=TextIndex(),
            color=LshIndex(LshConfig(seed=seed, vector_length=COLOR_VECTOR_BITS)),
            objects=LshIndex(LshConfig(seed=seed, vector_length=OBJECT_VECTOR_BITS)),
            features=FeatureStore(),
            videos=VideoTable(image_root),
        )


def load_image(path) -> np.ndarray | None:
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"))
    except (OSError, UnidentifiedImageError, ValueError):
        return None


def build_indexes(manifest: DatasetManifest, image_root, seed: int = 0) -> IndexBundle:
    """Run the full indexing pipeline over a validated manifest."""
    root = Path(image_root).resolve()
    bundle = IndexBundle.empty(seed=seed, image_root=str(root))
    for record in manifest.records:
        bundle.text.add_document(record.keyframe_id, record.annotations)
        bundle.videos.add(record.keyframe_id, record.video_id, record.frame_index, record.image_path)
        image = load_image(root / record.image_path)
        if image is None:
            logger.warning("skipping masks for %s: unreadable image %s", record.keyframe_id, record.image_path)
            continue
        colors = quantize_color_masks(image)
        objects = rasterize_object_masks(record.boxes)
        bundle.color.insert(record.keyframe_id, colors.concat())
        bundle.objects.insert(record.keyframe_id, objects.concat())
        bundle.features.add(record.keyframe_id, colors, objects)
    bundle.text.freeze()
    bundle.color.freeze()
    bundle.objects.freeze()
    return bundle


def _checksum(blob: bytes) -> str:
    return hashlib.sha256(blob).hexdigest()


def persist(bundle: IndexBundle, out_dir) -> None:
    """Write all index files plus a checksum manifest into a directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    blobs = {
        "text.idx": bundle.text.to_bytes(),
        "color.lsh": bundle.color.to_bytes(),
        "object.lsh": bundle.objects.to_bytes(),
        "features.bin": bundle.features.to_bytes(),
        "videos.tbl": bundle.videos.to_bytes(),
    }
    lines = []
    for name in INDEX_FILES:
        (out / name).write_bytes(blobs[name])
        lines.append(f"{_checksum(blobs[name])}  {name}\n")
    (out / CHECKSUM_FILE).write_text("".join(lines), encoding="utf-8")


def load(index_dir) -> IndexBundle:
    """Load a persisted index directory; refuses to return partial state.

    Every file's checksum is verified against the checksum manifest before
    any structure is parsed.
    """
    root = Path(index_dir)
    checksum_path = root / CHECKSUM_FILE
    if not checksum_path.is_file():
        raise StorageError(f"missing {CHECKSUM_FILE} in {root}")
    expected: dict[str, str] = {}
    for line in checksum_path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            digest, name = line.split(None, 1)
        except ValueError as exc:
            raise StorageError(f"malformed checksum line: {line!r}") from exc
        expected[name.strip()] = digest

    blobs: dict[str, bytes] = {}
    for name in INDEX_FILES:
        path = root / name
        if not path.is_file():
            raise StorageError(f"missing index file {name} in {root}")
        blob = path.read_bytes()
        if name not in expected:
            raise StorageError(f"no checksum recorded for {name}")
        if _checksum(blob) != expected[name]:
            raise StorageError(f"checksum mismatch for {name}")
        blobs[name] = blob

    bundle = IndexBundle(
        text=TextIndex.from_bytes(blobs["text.idx"]),
        color=LshIndex.from_bytes(blobs["color.lsh"]),
        objects=LshIndex.from_bytes(blobs["object.lsh"]),
        features=FeatureStore.from_bytes(blobs["features.bin"]),
        videos=VideoTable.from_bytes(blobs["videos.tbl"]),
    )
    bundle.text.freeze()
    bundle.color.freeze()
    bundle.objects.freeze()
    return bundle
