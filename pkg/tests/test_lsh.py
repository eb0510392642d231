import numpy as np
import pytest

from sloth_search.errors import ConfigError, ConflictError, InvalidInputError, StorageError
from sloth_search.evaluate import evaluate_recall, exhaustive_top_k
from sloth_search.lsh import LshConfig, LshIndex
from sloth_search.masks import cosine_distance


def sparse_vectors(n, length=2048, density=0.05, seed=0):
    rng = np.random.default_rng(seed)
    return rng.random((n, length)) < density


def filled_index(n=200, seed=13, vec_seed=1):
    vecs = sparse_vectors(n, seed=vec_seed)
    index = LshIndex(LshConfig(seed=seed))
    for i in range(n):
        index.insert(f"item{i:05d}", vecs[i])
    return index, vecs


# ---------------------------------------------------------------- config


def test_config_defaults():
    cfg = LshConfig()
    assert cfg.tables == 8 and cfg.bits_per_signature == 16


@pytest.mark.parametrize(
    "kwargs",
    [
        {"vector_length": 1024},
        {"tables": 0},
        {"bits_per_signature": 0},
        {"bits_per_signature": 65},
        {"seed": -1},
    ],
)
def test_config_rejects_bad_values(kwargs):
    with pytest.raises(ConfigError):
        LshConfig(**kwargs)


def test_build_gives_empty_tables():
    index = LshIndex(LshConfig(tables=8, bits_per_signature=16))
    assert len(index) == 0
    for t in range(8):
        assert index.bucket_sizes(t) == []


# ---------------------------------------------------------------- signatures


def test_same_seed_gives_identical_hyperplanes():
    v = sparse_vectors(1, seed=3)[0]
    a = LshIndex(LshConfig(seed=7))
    b = LshIndex(LshConfig(seed=7))
    assert a.signatures(v) == b.signatures(v)


def test_different_seed_changes_signatures():
    v = sparse_vectors(1, seed=3)[0]
    a = LshIndex(LshConfig(seed=7))
    b = LshIndex(LshConfig(seed=8))
    assert a.signatures(v) != b.signatures(v)


def test_signature_deterministic_and_equal_for_copies():
    index = LshIndex(LshConfig(seed=5))
    v = sparse_vectors(1, seed=9)[0]
    assert index.signatures(v) == index.signatures(v.copy())
    assert index.signature(0, v) == index.signatures(v)[0]


def test_zero_vector_signature_uses_ge_convention():
    # dot(h, 0) = 0 and 0 maps to bit 1, so every signature is all-ones
    index = LshIndex(LshConfig(seed=1))
    zero = np.zeros(2048, dtype=bool)
    expected = (1 << 16) - 1
    assert index.signatures(zero) == [expected] * 8


def test_signature_rejects_wrong_length():
    index = LshIndex(LshConfig())
    with pytest.raises(InvalidInputError):
        index.signatures(np.zeros(100, dtype=bool))


def test_signature_agreement_tracks_cosine_similarity():
    # pairs made by flipping a controlled fraction of bits span a range of
    # cosine similarities; per-bucket mean bit agreement must be monotone
    rng = np.random.default_rng(42)
    index = LshIndex(LshConfig(seed=9))
    total_bits = 8 * 16
    edges = [0.0, 0.55, 0.7, 0.85, 0.999, 1.0001]
    buckets = [[] for _ in range(len(edges) - 1)]
    for _ in range(1000):
        a = rng.random(2048) < 0.08
        flip_rate = (0.0, 0.02, 0.05, 0.1, 0.2)[int(rng.integers(5))]
        b = a ^ (rng.random(2048) < flip_rate)
        sim = 1.0 - cosine_distance(a, b)
        diff = sum(
            bin(sa ^ sb).count("1") for sa, sb in zip(index.signatures(a), index.signatures(b))
        )
        agreement = 1.0 - diff / total_bits
        for i in range(len(buckets)):
            if edges[i] <= sim < edges[i + 1]:
                buckets[i].append(agreement)
                break
    means = [np.mean(b) for b in buckets if b]
    assert len(means) >= 4
    assert all(lo < hi for lo, hi in zip(means, means[1:]))


# ---------------------------------------------------------------- insert


def test_insert_then_query_returns_self_at_zero():
    index, vecs = filled_index(50)
    hits = index.query(vecs[7], 5)
    assert hits[0] == ("item00007", 0.0)


def test_duplicate_id_conflicts():
    index, vecs = filled_index(3)
    with pytest.raises(ConflictError):
        index.insert("item00000", vecs[1])


def test_identical_vectors_share_every_bucket():
    v = sparse_vectors(1, seed=2)[0]
    index = LshIndex(LshConfig(seed=4))
    index.insert("a", v)
    index.insert("b", v)
    for t in range(index.config.tables):
        assert index.bucket_sizes(t) == [2]


def test_bucket_sizes_partition_ids_per_table():
    index, _ = filled_index(1000)
    for t in range(index.config.tables):
        assert sum(index.bucket_sizes(t)) == 1000


def test_insert_after_freeze_conflicts():
    index, vecs = filled_index(5)
    index.freeze()
    with pytest.raises(ConflictError):
        index.insert("later", vecs[0])


# ---------------------------------------------------------------- query


def test_query_k_zero_is_empty():
    index, vecs = filled_index(10)
    assert index.query(vecs[0], 0) == []


def test_query_single_item_index():
    v = sparse_vectors(1, seed=6)[0]
    index = LshIndex(LshConfig(seed=1))
    index.insert("only", v)
    assert index.query(v, 3) == [("only", 0.0)]


def test_distances_are_exact_not_hamming():
    index, vecs = filled_index(300)
    for qi in (0, 10, 42):
        for item, dist in index.query(vecs[qi], 20):
            assert dist == cosine_distance(vecs[qi], index.vector(item))


def test_result_list_is_monotone_with_id_tiebreak():
    v = sparse_vectors(1, seed=12)[0]
    index = LshIndex(LshConfig(seed=2))
    index.insert("b", v)
    index.insert("a", v)
    index.insert("c", v)
    hits = index.query(v, 3)
    assert hits == [("a", 0.0), ("b", 0.0), ("c", 0.0)]

    index2, vecs = filled_index(100)
    dists = [d for _, d in index2.query(vecs[0], 50)]
    assert dists == sorted(dists)


def test_fallback_matches_exhaustive_scan_exactly():
    # 5 items can never fill k=10 from buckets, forcing the fallback
    index, vecs = filled_index(5)
    probe = sparse_vectors(1, seed=33)[0]
    assert index.query(probe, 10) == exhaustive_top_k(index, probe, 10)


def test_no_false_drop_at_distance_zero():
    index, vecs = filled_index(400)
    for qi in (3, 77, 250):
        hits = index.query(vecs[qi], 10)
        assert (f"item{qi:05d}", 0.0) in hits


def test_seed_determinism_of_query_results():
    a, vecs = filled_index(120, seed=21, vec_seed=5)
    b, _ = filled_index(120, seed=21, vec_seed=5)
    probe = sparse_vectors(1, seed=50)[0]
    assert a.query(probe, 15) == b.query(probe, 15)


def test_recall_against_exhaustive_oracle():
    vecs = sparse_vectors(2000, seed=8)
    index = LshIndex(LshConfig(seed=31))
    for i in range(len(vecs)):
        index.insert(f"item{i:05d}", vecs[i])
    index.freeze()
    report = evaluate_recall(index, queries=30, k=10, seed=4)
    assert report["mean_recall"] >= 0.9


def test_empty_query_vector_is_handled():
    index, _ = filled_index(20)
    zero = np.zeros(2048, dtype=bool)
    hits = index.query(zero, 5)
    assert all(d == 1.0 for _, d in hits)  # nothing stored is empty


# ---------------------------------------------------------------- serialization


def test_serialization_round_trip_is_bit_exact():
    index, vecs = filled_index(64)
    blob = index.to_bytes()
    clone = LshIndex.from_bytes(blob)
    assert clone.to_bytes() == blob
    assert clone.query(vecs[5], 7) == index.query(vecs[5], 7)


def test_save_load_round_trip(tmp_path):
    index, _ = filled_index(16)
    path = tmp_path / "color.lsh"
    index.save(path)
    assert LshIndex.load(path).to_bytes() == index.to_bytes()


def test_bad_magic_rejected():
    with pytest.raises(StorageError):
        LshIndex.from_bytes(b"XXXX" + b"\x00" * 32)


def test_bad_version_rejected():
    index, _ = filled_index(2)
    blob = bytearray(index.to_bytes())
    blob[4] = 99
    with pytest.raises(StorageError):
        LshIndex.from_bytes(bytes(blob))


def test_truncated_file_rejected():
    index, _ = filled_index(8)
    blob = index.to_bytes()
    with pytest.raises(StorageError):
        LshIndex.from_bytes(blob[: len(blob) - 3])
