"""Weighted late fusion of text and sketch modality scores, plus per-video
grouping of the fused ranking.

The combined score for a keyframe is

    sim_all = w_t * sim_t + w_c * (1 - dist_c) + w_o * (1 - dist_o)

A modality is active when it has query input and a positive weight. Inactive
modalities contribute nothing and their hit lists are ignored, which makes
degenerate weights reproduce the single-modality ranking exactly. Candidates
are the union of the active lists; when a candidate is missing from an active
sketch list its distance is recomputed exactly from the feature store instead
of being defaulted (a keyframe found only by text should not be punished on
the sketch channels it was never scored on). A keyframe with no stored masks
keeps an absent distance, which contributes zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyQueryError, InvalidInputError
from .masks import cosine_distance


@dataclass(frozen=True)
class FusionWeights:
    w_t: float = 1.0
    w_c: float = 1.0
    w_o: float = 1.0

    def __post_init__(self):
        for name, value in (("w_t", self.w_t), ("w_c", self.w_c), ("w_o", self.w_o)):
            if float(value) < 0.0:
                raise InvalidInputError(f"fusion weight {name} must be non-negative")


@dataclass(frozen=True)
class ScoredHit:
    """Per-keyframe modality scores; None marks an inactive or unscorable channel."""

    keyframe: str
    video: str
    sim_t: float | None
    dist_c: float | None
    dist_o: float | None
    sim_all: float


@dataclass(frozen=True)
class VideoGroup:
    video: str
    hits: tuple[ScoredHit, ...]
    group_score: float  # max sim_all within the group


def _sketch_active(query, weight: float) -> bool:
    return query is not None and weight > 0.0 and bool(np.any(query))


def _sketch_distance(keyframe, hit_map, query, stored_vector):
    if keyframe in hit_map:
        return hit_map[keyframe]
    stored = stored_vector(keyframe)
    if stored is None:
        return None  # no ingested masks for this keyframe
    return cosine_distance(query, stored)


def fuse(
    text_hits,
    color_hits,
    object_hits,
    weights: FusionWeights,
    feature_store,
    limit: int | None,
    color_query=None,
    object_query=None,
) -> list[ScoredHit]:
    """Merge per-modality hit lists into one ranking, descending sim_all.

    `text_hits` is None when no text query ran (vs. [] for a query with no
    matches); the sketch modalities signal the same through their query
    vectors. `feature_store` must provide color_vector(id), object_vector(id)
    (either may return None) and video_of(id). Ties break by ascending
    keyframe id; `limit=None` returns the full candidate ranking.
    """
    text_active = text_hits is not None and weights.w_t > 0.0
    color_active = _sketch_active(color_query, weights.w_c)
    object_active = _sketch_active(object_query, weights.w_o)
    if not (text_active or color_active or object_active):
        raise EmptyQueryError("no active query modality")

    text_map = dict(text_hits) if text_active else {}
    color_map = dict(color_hits or ()) if color_active else {}
    object_map = dict(object_hits or ()) if object_active else {}

    hits = []
    for keyframe in set(text_map) | set(color_map) | set(object_map):
        sim_t = text_map.get(keyframe, 0.0) if text_active else None
        dist_c = (
            _sketch_distance(keyframe, color_map, color_query, feature_store.color_vector)
            if color_active
            else None
        )
        dist_o = (
            _sketch_distance(keyframe, object_map, object_query, feature_store.object_vector)
            if object_active
            else None
        )
        sim_all = 0.0
        if text_active:
            sim_all += weights.w_t * sim_t
        if color_active and dist_c is not None:
            sim_all += weights.w_c * (1.0 - dist_c)
        if object_active and dist_o is not None:
            sim_all += weights.w_o * (1.0 - dist_o)
        hits.append(
            ScoredHit(keyframe, feature_store.video_of(keyframe), sim_t, dist_c, dist_o, sim_all)
        )

    hits.sort(key=lambda h: (-h.sim_all, h.keyframe))
    return hits if limit is None else hits[:limit]


def group_by_video(hits) -> list[VideoGroup]:
    """Group a descending-sim_all hit list into per-video rows.

    Groups sort by their best member's score (ties by ascending video id);
    members keep their incoming order.
    """
    by_video: dict[str, list[ScoredHit]] = {}
    for hit in hits:
        by_video.setdefault(hit.video, []).append(hit)
    groups = [
        VideoGroup(video, tuple(members), members[0].sim_all)
        for video, members in by_video.items()
    ]
    groups.sort(key=lambda g: (-g.group_score, g.video))
    return groups
