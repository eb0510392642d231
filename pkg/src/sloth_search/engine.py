"""Search orchestration shared by the HTTP service and the CLI.

One entry point runs the whole retrieval flow: per-modality searches at a
candidate depth of 4x the requested limit, late fusion, and optional
per-video grouping. The engine is read-only over a loaded index bundle, so
any number of callers may share it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyQueryError, InvalidInputError
from .fusion import FusionWeights, ScoredHit, VideoGroup, fuse, group_by_video
from .ingest import IndexBundle, load
from .masks import COLOR_BLOB_BYTES, GRID, OBJECT_BLOB_BYTES, OBJECT_LABELS, PALETTE
from .textindex import normalize_scores

CANDIDATE_FACTOR = 4  # per-modality search depth relative to the result limit
DEFAULT_LIMIT = 100
MAX_LIMIT = 1000

MODES = ("flat", "grouped")


@dataclass(frozen=True)
class SearchOutcome:
    mode: str
    hits: tuple[ScoredHit, ...]
    groups: tuple[VideoGroup, ...] | None
    candidate_count: int


def decode_mask_blob(raw: bytes | None, expected_bytes: int, what: str) -> np.ndarray | None:
    if raw is None:
        return None
    if len(raw) != expected_bytes:
        raise InvalidInputError(f"{what} mask blob must be {expected_bytes} bytes, got {len(raw)}")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little").astype(bool)


class _BundleFeatures:
    """Feature-store adapter handed to the fusion step."""

    def __init__(self, bundle: IndexBundle):
        self._bundle = bundle

    def color_vector(self, keyframe_id):
        return self._bundle.features.color_vector(keyframe_id)

    def object_vector(self, keyframe_id):
        return self._bundle.features.object_vector(keyframe_id)

    def video_of(self, keyframe_id):
        return self._bundle.videos.video_of(keyframe_id)


class SearchEngine:
    def __init__(self, bundle: IndexBundle):
        self.bundle = bundle
        self._features = _BundleFeatures(bundle)

    @classmethod
    def load(cls, index_dir) -> "SearchEngine":
        return cls(load(index_dir))

    def search(
        self,
        text: str | None = None,
        color_mask: bytes | None = None,
        object_mask: bytes | None = None,
        weights: FusionWeights = FusionWeights(),
        mode: str = "flat",
        limit: int = DEFAULT_LIMIT,
    ) -> SearchOutcome:
        if mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}")
        if not 1 <= limit <= MAX_LIMIT:
            raise InvalidInputError(f"limit must be in [1, {MAX_LIMIT}]")
        if text is not None and not text.strip():
            text = None
        if text is None and color_mask is None and object_mask is None:
            raise EmptyQueryError("query needs text or a sketch mask")

        depth = CANDIDATE_FACTOR * limit
        text_hits = None
        if text is not None:
            text_hits = normalize_scores(self.bundle.text.search(text, depth))

        color_query = decode_mask_blob(color_mask, COLOR_BLOB_BYTES, "color")
        object_query = decode_mask_blob(object_mask, OBJECT_BLOB_BYTES, "object")
        color_hits = self.bundle.color.query(color_query, depth) if color_query is not None else None
        object_hits = self.bundle.objects.query(object_query, depth) if object_query is not None else None

        full = fuse(
            text_hits,
            color_hits,
            object_hits,
            weights,
            self._features,
            limit=None,
            color_query=color_query,
            object_query=object_query,
        )
        hits = tuple(full[:limit])
        groups = tuple(group_by_video(hits)) if mode == "grouped" else None
        return SearchOutcome(mode=mode, hits=hits, groups=groups, candidate_count=len(full))

    # --- browse / metadata -------------------------------------------------

    def has_video(self, video_id: str) -> bool:
        return self.bundle.videos.keyframes(video_id) is not None

    def video_keyframes(self, video_id: str) -> list[tuple[str, int]] | None:
        """(keyframe_id, frame_index) pairs in ascending frame order."""
        members = self.bundle.videos.keyframes(video_id)
        if members is None:
            return None
        return [(kf, self.bundle.videos.frame_index(kf)) for kf in members]

    def has_thumbnail(self, keyframe_id: str) -> bool:
        return keyframe_id in self.bundle.features and keyframe_id in self.bundle.videos

    def thumbnail_path(self, keyframe_id: str):
        if not self.has_thumbnail(keyframe_id):
            return None
        return self.bundle.videos.image_path(keyframe_id)

    def config_payload(self) -> dict:
        return {
            "grid_size": GRID,
            "palette": [{"name": c.name, "anchor": list(c.anchor)} for c in PALETTE],
            "object_labels": list(OBJECT_LABELS),
            "default_weights": {"w_t": 1.0, "w_c": 1.0, "w_o": 1.0},
            "color_mask_bytes": COLOR_BLOB_BYTES,
            "object_mask_bytes": OBJECT_BLOB_BYTES,
        }
