"""Interactive video keyframe retrieval engine.

Text search over concept labels (TF/IDF inverted index), sketch search over
16x16 binary color and object-location masks (random-hyperplane signatures
with exact cosine re-ranking), weighted late fusion of the modalities, and
flat or video-grouped result presentation with a per-video shot view.
"""

from .engine import SearchEngine, SearchOutcome
from .fusion import FusionWeights, ScoredHit, VideoGroup, fuse, group_by_video
from .ingest import IndexBundle, build_indexes, load, persist
from .lsh import LshConfig, LshIndex
from .manifest import DatasetManifest, KeyframeRecord, load_manifest
from .masks import (
    BoundingBox,
    ColorMaskSet,
    ObjectMaskSet,
    cosine_distance,
    quantize_color_masks,
    rasterize_object_masks,
)
from .textindex import ConceptAnnotations, TextIndex, normalize_scores, tokenize

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "ColorMaskSet",
    "ConceptAnnotations",
    "DatasetManifest",
    "FusionWeights",
    "IndexBundle",
    "KeyframeRecord",
    "LshConfig",
    "LshIndex",
    "ObjectMaskSet",
    "ScoredHit",
    "SearchEngine",
    "SearchOutcome",
    "TextIndex",
    "VideoGroup",
    "build_indexes",
    "cosine_distance",
    "fuse",
    "group_by_video",
    "load",
    "load_manifest",
    "normalize_scores",
    "persist",
    "quantize_color_masks",
    "rasterize_object_masks",
    "tokenize",
]
