"""16x16 binary masks over keyframes: dominant-color quantization, object
box rasterization, concatenated bit vectors, and cosine distance over them.

Every keyframe carries 8 color masks (one per palette color, a partition of
the grid) and 10 object masks (one per spatially indexed label, freely
overlapping).  A mask serializes to exactly 32 bytes: bit i lands in byte
i // 8 at bit position i % 8.  That layout is shared by the on-disk feature
store and the HTTP wire format, so it must not drift.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

logger = logging.getLogger(__name__)

GRID = 16
MASK_BITS = GRID * GRID  # 256 cells, row-major, row 0 = top
MASK_BYTES = MASK_BITS // 8


@dataclass(frozen=True)
class PaletteColor:
    name: str
    anchor: tuple[int, int, int]


# Fixed 8-color palette in canonical order. Anchors are plain RGB
# representatives; assignment is nearest-anchor in Euclidean RGB, which sends
# low-saturation pixels to gray without any special casing.
PALETTE: tuple[PaletteColor, ...] = (
    PaletteColor("red", (200, 30, 30)),
    PaletteColor("purple", (130, 40, 140)),
    PaletteColor("dark-blue", (25, 35, 120)),
    PaletteColor("light-blue", (90, 170, 220)),
    PaletteColor("green", (50, 140, 60)),
    PaletteColor("yellow", (230, 210, 50)),
    PaletteColor("orange", (235, 140, 30)),
    PaletteColor("gray", (128, 128, 128)),
)
PALETTE_NAMES: tuple[str, ...] = tuple(c.name for c in PALETTE)
PALETTE_INDEX: dict[str, int] = {c.name: i for i, c in enumerate(PALETTE)}
_ANCHORS = np.array([c.anchor for c in PALETTE], dtype=np.float64)

# Fixed spatially indexed object vocabulary in canonical order.
OBJECT_LABELS: tuple[str, ...] = (
    "person",
    "man",
    "woman",
    "face",
    "clothing",
    "tree",
    "plant",
    "car",
    "window",
    "poster",
)
OBJECT_INDEX: dict[str, int] = {name: i for i, name in enumerate(OBJECT_LABELS)}

COLOR_VECTOR_BITS = len(PALETTE) * MASK_BITS  # 2048
OBJECT_VECTOR_BITS = len(OBJECT_LABELS) * MASK_BITS  # 2560
COLOR_BLOB_BYTES = COLOR_VECTOR_BITS // 8  # 256
OBJECT_BLOB_BYTES = OBJECT_VECTOR_BITS // 8  # 320


def pack_bits(bits: np.ndarray) -> bytes:
    """Pack a 1-D bit array into bytes, bit i -> byte i//8, position i%8."""
    return np.packbits(np.asarray(bits, dtype=bool), bitorder="little").tobytes()


def unpack_bits(raw: bytes, nbits: int) -> np.ndarray:
    if len(raw) * 8 != nbits:
        raise InvalidInputError(f"expected {nbits // 8} bytes, got {len(raw)}")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little").astype(bool)


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in normalized image coordinates, origin top-left."""

    label: str
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        ok = 0.0 <= self.x0 < self.x1 <= 1.0 and 0.0 <= self.y0 < self.y1 <= 1.0
        if not ok:
            raise InvalidInputError(
                f"malformed box {self.label!r} ({self.x0}, {self.y0}, {self.x1}, {self.y1}): "
                "require 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1"
            )


@dataclass(frozen=True, eq=False)
class ColorMaskSet:
    """8 binary masks in canonical palette order; together they partition the grid."""

    bits: np.ndarray  # (8, 256) bool

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (len(PALETTE), MASK_BITS):
            raise InvalidInputError(f"color mask set must be {len(PALETTE)}x{MASK_BITS} bits")
        if not np.all(bits.sum(axis=0) == 1):
            raise InvalidInputError("color masks must cover every cell with exactly one color")
        bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def mask(self, name: str) -> np.ndarray:
        return self.bits[PALETTE_INDEX[name]]

    def concat(self) -> np.ndarray:
        """2048-bit vector: the 8 masks in palette order, each row-major."""
        return self.bits.reshape(-1)

    def cell_labels(self) -> np.ndarray:
        """Palette index per cell (the partition makes this exact)."""
        return self.bits.argmax(axis=0)

    def to_bytes(self) -> bytes:
        return pack_bits(self.concat())

    @classmethod
    def from_bytes(cls, raw: bytes) -> "ColorMaskSet":
        return cls(unpack_bits(raw, COLOR_VECTOR_BITS).reshape(len(PALETTE), MASK_BITS))

    @classmethod
    def from_concat(cls, vec: np.ndarray) -> "ColorMaskSet":
        vec = np.asarray(vec, dtype=bool)
        if vec.shape != (COLOR_VECTOR_BITS,):
            raise InvalidInputError(f"color vector must have {COLOR_VECTOR_BITS} bits")
        return cls(vec.reshape(len(PALETTE), MASK_BITS))

    @classmethod
    def from_cell_labels(cls, labels: np.ndarray) -> "ColorMaskSet":
        labels = np.asarray(labels)
        if labels.shape != (MASK_BITS,):
            raise InvalidInputError(f"need one palette label per cell ({MASK_BITS})")
        if labels.min() < 0 or labels.max() >= len(PALETTE):
            raise InvalidInputError("palette label out of range")
        return cls(labels[None, :] == np.arange(len(PALETTE))[:, None])

    def __eq__(self, other):
        return isinstance(other, ColorMaskSet) and np.array_equal(self.bits, other.bits)


@dataclass(frozen=True, eq=False)
class ObjectMaskSet:
    """10 binary masks in canonical label order; masks may overlap or be empty."""

    bits: np.ndarray  # (10, 256) bool

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.shape != (len(OBJECT_LABELS), MASK_BITS):
            raise InvalidInputError(f"object mask set must be {len(OBJECT_LABELS)}x{MASK_BITS} bits")
        bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def mask(self, label: str) -> np.ndarray:
        return self.bits[OBJECT_INDEX[label]]

    def concat(self) -> np.ndarray:
        """2560-bit vector: the 10 masks in label order, each row-major."""
        return self.bits.reshape(-1)

    def to_bytes(self) -> bytes:
        return pack_bits(self.concat())

    @classmethod
    def empty(cls) -> "ObjectMaskSet":
        return cls(np.zeros((len(OBJECT_LABELS), MASK_BITS), dtype=bool))

    @classmethod
    def from_bytes(cls, raw: bytes) -> "ObjectMaskSet":
        return cls(unpack_bits(raw, OBJECT_VECTOR_BITS).reshape(len(OBJECT_LABELS), MASK_BITS))

    @classmethod
    def from_concat(cls, vec: np.ndarray) -> "ObjectMaskSet":
        vec = np.asarray(vec, dtype=bool)
        if vec.shape != (OBJECT_VECTOR_BITS,):
            raise InvalidInputError(f"object vector must have {OBJECT_VECTOR_BITS} bits")
        return cls(vec.reshape(len(OBJECT_LABELS), MASK_BITS))

    def __eq__(self, other):
        return isinstance(other, ObjectMaskSet) and np.array_equal(self.bits, other.bits)


def _cell_index(extent: int) -> np.ndarray:
    # Pixel i (center i + 0.5) belongs to cell floor((i + 0.5) * GRID / extent);
    # integer arithmetic keeps the boundary exact.
    coords = np.arange(extent, dtype=np.int64)
    return (GRID * (2 * coords + 1)) // (2 * extent)


def quantize_color_masks(image: np.ndarray) -> ColorMaskSet:
    """Assign each grid cell its dominant palette color.

    The cell's pixels (by pixel-center membership) are averaged in RGB and the
    nearest palette anchor wins; ties break toward the earlier palette entry.
    Accepts any H x W x 3 raster with H, W >= 16.
    """
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidInputError("image must be an H x W x 3 RGB raster")
    h, w = arr.shape[:2]
    if h < GRID or w < GRID:
        raise InvalidInputError(f"image must be at least {GRID}x{GRID}, got {w}x{h}")

    rows = _cell_index(h)
    cols = _cell_index(w)
    cell = (rows[:, None] * GRID + cols[None, :]).ravel()
    px = arr.reshape(-1, 3).astype(np.float64)

    counts = np.bincount(cell, minlength=MASK_BITS).astype(np.float64)
    means = np.empty((MASK_BITS, 3), dtype=np.float64)
    for ch in range(3):
        means[:, ch] = np.bincount(cell, weights=px[:, ch], minlength=MASK_BITS) / counts

    d2 = ((means[:, None, :] - _ANCHORS[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)  # first minimum wins: canonical palette order on ties
    return ColorMaskSet.from_cell_labels(labels)


def _covered_cells(lo: float, hi: float) -> tuple[int, int]:
    # Cells whose [c/16, (c+1)/16) span overlaps (lo, hi) with positive measure.
    # Multiplying by 16 is exact in binary floating point, so the boundaries
    # agree with a direct per-cell comparison.
    start = int(math.floor(lo * GRID))
    stop = int(math.ceil(hi * GRID)) - 1
    return max(start, 0), min(stop, GRID - 1)


def rasterize_object_masks(boxes) -> ObjectMaskSet:
    """Burn bounding boxes into per-label masks.

    A cell is set as soon as any positive area of a box touches it. Labels
    match the vocabulary case-insensitively; anything else is ignored (the
    upstream annotations carry far more classes than the 10 indexed ones).
    """
    bits = np.zeros((len(OBJECT_LABELS), MASK_BITS), dtype=bool)
    for box in boxes:
        idx = OBJECT_INDEX.get(box.label.strip().lower())
        if idx is None:
            logger.debug("ignoring box with unindexed label %r", box.label)
            continue
        c0, c1 = _covered_cells(box.x0, box.x1)
        r0, r1 = _covered_cells(box.y0, box.y1)
        grid = bits[idx].reshape(GRID, GRID)
        grid[r0 : r1 + 1, c0 : c1 + 1] = True
    return ObjectMaskSet(bits)


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - cos(a, b) for binary vectors, in [0, 1].

    Conventions: two empty vectors are identical (0); one empty vector
    matches nothing (1).
    """
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise InvalidInputError(f"vector length mismatch: {a.shape} vs {b.shape}")
    pa = int(np.count_nonzero(a))
    pb = int(np.count_nonzero(b))
    if pa == 0 and pb == 0:
        return 0.0
    if pa == 0 or pb == 0:
        return 1.0
    inter = int(np.count_nonzero(a & b))
    # sqrt of the exact integer product, not sqrt(pa)*sqrt(pb): one correctly
    # rounded sqrt keeps d(a,b) for bits {0,1} vs {1,2} at exactly 0.5
    return 1.0 - inter / math.sqrt(pa * pb)
