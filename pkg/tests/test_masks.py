import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sloth_search.errors import InvalidInputError
from sloth_search.masks import (
    GRID,
    MASK_BITS,
    OBJECT_INDEX,
    OBJECT_LABELS,
    PALETTE,
    PALETTE_NAMES,
    BoundingBox,
    ColorMaskSet,
    ObjectMaskSet,
    cosine_distance,
    pack_bits,
    quantize_color_masks,
    rasterize_object_masks,
    unpack_bits,
)


def solid_image(anchor, size=64):
    return np.full((size, size, 3), anchor, dtype=np.uint8)


# ---------------------------------------------------------------- palette


def test_palette_is_fixed_and_ordered():
    assert PALETTE_NAMES == (
        "red", "purple", "dark-blue", "light-blue", "green", "yellow", "orange", "gray",
    )
    anchors = {c.anchor for c in PALETTE}
    assert len(anchors) == len(PALETTE)


def test_object_vocabulary_is_fixed_and_ordered():
    assert OBJECT_LABELS == (
        "person", "man", "woman", "face", "clothing", "tree", "plant", "car", "window", "poster",
    )


# ---------------------------------------------------------------- mask bytes


def test_mask_bit_layout():
    bits = np.zeros(MASK_BITS, dtype=bool)
    bits[0] = True
    bits[9] = True
    raw = pack_bits(bits)
    assert len(raw) == 32
    assert raw[0] == 0b00000001  # bit 0 -> byte 0, position 0
    assert raw[1] == 0b00000010  # bit 9 -> byte 1, position 1
    assert np.array_equal(unpack_bits(raw, MASK_BITS), bits)


# ---------------------------------------------------------------- quantize


def test_single_color_image_fills_one_mask():
    masks = quantize_color_masks(solid_image(PALETTE[0].anchor))
    assert masks.mask("red").all()
    for name in PALETTE_NAMES[1:]:
        assert not masks.mask(name).any()


def test_left_green_right_yellow_split():
    img = np.zeros((64, 64, 3), dtype=np.uint8)
    img[:, :32] = PALETTE[4].anchor  # green
    img[:, 32:] = PALETTE[5].anchor  # yellow
    masks = quantize_color_masks(img)
    green = masks.mask("green").reshape(GRID, GRID)
    yellow = masks.mask("yellow").reshape(GRID, GRID)
    assert green[:, :8].all() and not green[:, 8:].any()
    assert yellow[:, 8:].all() and not yellow[:, :8].any()
    for name in ("red", "purple", "dark-blue", "light-blue", "orange", "gray"):
        assert not masks.mask(name).any()


def test_mid_gray_image_goes_to_gray():
    masks = quantize_color_masks(solid_image((128, 128, 128), size=32))
    assert masks.mask("gray").all()


def test_image_smaller_than_grid_rejected():
    with pytest.raises(InvalidInputError):
        quantize_color_masks(np.zeros((15, 64, 3), dtype=np.uint8))
    with pytest.raises(InvalidInputError):
        quantize_color_masks(np.zeros((64, 15, 3), dtype=np.uint8))


def test_quantize_is_deterministic():
    rng = np.random.default_rng(5)
    img = rng.integers(0, 256, size=(40, 52, 3), dtype=np.uint8)
    assert quantize_color_masks(img) == quantize_color_masks(img.copy())


def quantize_oracle(img):
    """Per-cell loop: mean RGB of pixel centers in the cell, nearest anchor."""
    h, w = img.shape[:2]
    anchors = np.array([c.anchor for c in PALETTE], dtype=np.float64)
    labels = np.empty(MASK_BITS, dtype=np.int64)
    for r in range(GRID):
        for c in range(GRID):
            ys = [y for y in range(h) if (GRID * (2 * y + 1)) // (2 * h) == r]
            xs = [x for x in range(w) if (GRID * (2 * x + 1)) // (2 * w) == c]
            mean = img[np.ix_(ys, xs)].reshape(-1, 3).astype(np.float64).mean(axis=0)
            labels[r * GRID + c] = int(((mean - anchors) ** 2).sum(axis=1).argmin())
    return labels


@pytest.mark.parametrize("size", [(16, 16), (17, 23), (64, 64), (50, 33)])
def test_quantize_matches_per_cell_oracle(size):
    rng = np.random.default_rng(hash(size) % (2**32))
    img = rng.integers(0, 256, size=(*size, 3), dtype=np.uint8)
    masks = quantize_color_masks(img)
    assert np.array_equal(masks.cell_labels(), quantize_oracle(img))


def test_partition_property_on_random_images():
    rng = np.random.default_rng(99)
    for _ in range(50):
        h = int(rng.integers(16, 80))
        w = int(rng.integers(16, 80))
        img = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
        masks = quantize_color_masks(img)
        union = masks.bits.sum(axis=0)
        assert np.all(union == 1)  # OR all-ones, pairwise ANDs empty


# ---------------------------------------------------------------- rasterize


def test_full_frame_box_sets_every_bit():
    masks = rasterize_object_masks([BoundingBox("person", 0, 0, 1, 1)])
    assert masks.mask("person").all()
    for label in OBJECT_LABELS[1:]:
        assert not masks.mask(label).any()


def test_quarter_box_covers_64_cells():
    masks = rasterize_object_masks([BoundingBox("person", 0, 0, 0.5, 0.5)])
    grid = masks.mask("person").reshape(GRID, GRID)
    assert grid[:8, :8].all()
    assert int(grid.sum()) == 64


def test_unknown_label_is_ignored():
    masks = rasterize_object_masks([BoundingBox("dog", 0.1, 0.1, 0.9, 0.9)])
    assert not masks.concat().any()


def test_label_match_is_case_insensitive():
    masks = rasterize_object_masks([BoundingBox("  Person ", 0, 0, 1, 1)])
    assert masks.mask("person").all()


def test_malformed_box_names_the_box():
    with pytest.raises(InvalidInputError, match="car"):
        BoundingBox("car", 0.5, 0.1, 0.5, 0.9)
    with pytest.raises(InvalidInputError):
        BoundingBox("car", -0.1, 0.0, 0.5, 0.5)


def test_same_label_boxes_or_together():
    masks = rasterize_object_masks(
        [BoundingBox("car", 0, 0, 0.25, 0.25), BoundingBox("car", 0.75, 0.75, 1, 1)]
    )
    grid = masks.mask("car").reshape(GRID, GRID)
    assert grid[:4, :4].all() and grid[12:, 12:].all()
    assert int(grid.sum()) == 32


def rasterize_oracle(boxes):
    bits = np.zeros((len(OBJECT_LABELS), MASK_BITS), dtype=bool)
    for box in boxes:
        idx = OBJECT_INDEX.get(box.label.strip().lower())
        if idx is None:
            continue
        for r in range(GRID):
            for c in range(GRID):
                x_overlap = box.x0 < (c + 1) / GRID and box.x1 > c / GRID
                y_overlap = box.y0 < (r + 1) / GRID and box.y1 > r / GRID
                if x_overlap and y_overlap:
                    bits[idx, r * GRID + c] = True
    return bits


def random_boxes(rng, n):
    boxes = []
    labels = OBJECT_LABELS + ("dog", "cat")
    for _ in range(n):
        x0, x1 = sorted(rng.uniform(0, 1, size=2))
        y0, y1 = sorted(rng.uniform(0, 1, size=2))
        if x1 <= x0 or y1 <= y0:
            continue
        boxes.append(BoundingBox(labels[int(rng.integers(len(labels)))], x0, y0, x1, y1))
    return boxes


def test_rasterize_matches_cell_overlap_oracle():
    rng = np.random.default_rng(4242)
    for _ in range(100):
        boxes = random_boxes(rng, int(rng.integers(0, 6)))
        assert np.array_equal(rasterize_object_masks(boxes).bits, rasterize_oracle(boxes))


def test_rasterize_is_monotone_in_boxes():
    rng = np.random.default_rng(77)
    boxes = random_boxes(rng, 4)
    for cut in range(len(boxes)):
        before = rasterize_object_masks(boxes[:cut]).bits
        after = rasterize_object_masks(boxes[: cut + 1]).bits
        assert not np.any(before & ~after)  # adding a box never clears a bit


# ---------------------------------------------------------------- concat


def test_color_concat_layout():
    labels = np.zeros(MASK_BITS, dtype=np.int64)  # all red
    vec = ColorMaskSet.from_cell_labels(labels).concat()
    assert vec[:256].all() and not vec[256:].any()

    gray = ColorMaskSet.from_cell_labels(np.full(MASK_BITS, 7))
    vec = gray.concat()
    assert vec[1792:2048].all() and not vec[:1792].any()


def test_color_concat_round_trip():
    rng = np.random.default_rng(3)
    masks = ColorMaskSet.from_cell_labels(rng.integers(0, 8, size=MASK_BITS))
    assert ColorMaskSet.from_concat(masks.concat()) == masks
    assert ColorMaskSet.from_bytes(masks.to_bytes()) == masks


def test_object_concat_layout():
    empty = ObjectMaskSet.empty()
    assert not empty.concat().any()

    bits = np.zeros((10, MASK_BITS), dtype=bool)
    bits[0] = True  # person
    assert ObjectMaskSet(bits).concat()[:256].all()

    bits = np.zeros((10, MASK_BITS), dtype=bool)
    bits[9] = True  # poster
    vec = ObjectMaskSet(bits).concat()
    assert vec[2304:2560].all() and not vec[:2304].any()


def test_object_concat_round_trip():
    rng = np.random.default_rng(8)
    masks = ObjectMaskSet(rng.random((10, MASK_BITS)) < 0.2)
    assert ObjectMaskSet.from_concat(masks.concat()) == masks
    assert ObjectMaskSet.from_bytes(masks.to_bytes()) == masks


def test_concat_injective_on_distinct_sets():
    a = ColorMaskSet.from_cell_labels(np.zeros(MASK_BITS, dtype=np.int64))
    b = ColorMaskSet.from_cell_labels(np.full(MASK_BITS, 7))
    assert not np.array_equal(a.concat(), b.concat())


# ---------------------------------------------------------------- cosine


def test_cosine_identical_vectors():
    v = np.zeros(64, dtype=bool)
    v[[1, 5, 9]] = True
    assert cosine_distance(v, v) == 0.0


def test_cosine_disjoint_vectors():
    a = np.zeros(8, dtype=bool)
    b = np.zeros(8, dtype=bool)
    a[[0, 1]] = True
    b[[2, 3]] = True
    assert cosine_distance(a, b) == 1.0


def test_cosine_half_overlap_is_exactly_half():
    a = np.zeros(8, dtype=bool)
    b = np.zeros(8, dtype=bool)
    a[[0, 1]] = True
    b[[1, 2]] = True
    assert cosine_distance(a, b) == 0.5


def test_cosine_empty_conventions():
    z = np.zeros(16, dtype=bool)
    v = np.zeros(16, dtype=bool)
    v[3] = True
    assert cosine_distance(z, z) == 0.0
    assert cosine_distance(z, v) == 1.0
    assert cosine_distance(v, z) == 1.0


def test_cosine_length_mismatch():
    with pytest.raises(InvalidInputError):
        cosine_distance(np.zeros(8, dtype=bool), np.zeros(16, dtype=bool))


@given(
    a=st.lists(st.booleans(), min_size=32, max_size=32),
    b=st.lists(st.booleans(), min_size=32, max_size=32),
)
def test_cosine_symmetry_and_range(a, b):
    a = np.array(a)
    b = np.array(b)
    d_ab = cosine_distance(a, b)
    assert d_ab == cosine_distance(b, a)
    assert 0.0 <= d_ab <= 1.0


@given(a=st.lists(st.booleans(), min_size=32, max_size=32).filter(any))
def test_cosine_self_distance_zero(a):
    a = np.array(a)
    assert cosine_distance(a, a) == 0.0
