"""Approximate nearest-neighbor search over binary mask vectors.

Random-hyperplane signatures bucket items per table; a query pulls the
matching bucket from every table and re-ranks the candidates by exact cosine
distance. Signatures are only a candidate filter: reported distances are
always recomputed from the stored vectors, and when the buckets cannot fill
k results the query falls back to a full scan (cheap at this corpus scale).

Hyperplanes use Rademacher (+1/-1) components drawn from the config seed, so
dot products reduce to popcounts and the whole structure is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .binio import ByteReader, write_str, write_u32, write_u64
from .errors import ConfigError, ConflictError, InvalidInputError, StorageError
from .masks import COLOR_VECTOR_BITS, OBJECT_VECTOR_BITS

_MAGIC = b"SLSH"
_VERSION = 1

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint16)


@dataclass(frozen=True)
class LshConfig:
    tables: int = 8
    bits_per_signature: int = 16
    seed: int = 0
    vector_length: int = COLOR_VECTOR_BITS

    def __post_init__(self):
        if self.tables < 1:
            raise ConfigError("tables must be >= 1")
        if not 1 <= self.bits_per_signature <= 64:
            raise ConfigError("bits_per_signature must be in [1, 64]")
        if self.vector_length not in (COLOR_VECTOR_BITS, OBJECT_VECTOR_BITS):
            raise ConfigError(
                f"vector_length must be {COLOR_VECTOR_BITS} or {OBJECT_VECTOR_BITS}, "
                f"got {self.vector_length}"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 unsigned bits")


class LshIndex:
    """Seeded signature tables plus an exact vector store.

    Single writer while building; call freeze() before handing the index to
    concurrent readers. Queries never mutate.
    """

    def __init__(self, config: LshConfig):
        self.config = config
        rng = np.random.default_rng(config.seed)
        n_planes = config.tables * config.bits_per_signature
        # True where the hyperplane component is +1, False where it is -1.
        self._plus = rng.integers(0, 2, size=(n_planes, config.vector_length), dtype=np.uint8).astype(bool)
        self._sig_weights = np.uint64(1) << np.arange(config.bits_per_signature, dtype=np.uint64)
        self._ids: list[str] = []
        self._id_to_row: dict[str, int] = {}
        self._packed: list[np.ndarray] = []
        self._pops: list[int] = []
        self._buckets: list[dict[int, list[int]]] = [dict() for _ in range(config.tables)]
        self._frozen = False
        self._matrix: np.ndarray | None = None
        self._pop_arr: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._id_to_row

    def item_ids(self) -> list[str]:
        return list(self._ids)

    def vector(self, item_id: str) -> np.ndarray:
        row = self._id_to_row[item_id]
        return np.unpackbits(self._packed[row], bitorder="little").astype(bool)

    def _check_vector(self, v) -> np.ndarray:
        vec = np.asarray(v, dtype=bool)
        if vec.ndim != 1 or vec.shape[0] != self.config.vector_length:
            raise InvalidInputError(
                f"vector must have {self.config.vector_length} bits, got shape {vec.shape}"
            )
        return vec

    def _signature_bits(self, vec: np.ndarray) -> np.ndarray:
        on = np.flatnonzero(vec)
        if on.size == 0:
            dots = np.zeros(self._plus.shape[0], dtype=np.int64)
        else:
            # dot(h, v) over +-1 components = 2 * |{set bits where +1}| - |set bits|
            plus = self._plus[:, on].sum(axis=1, dtype=np.int64)
            dots = 2 * plus - on.size
        return dots >= 0  # sign convention: 0 maps to bit 1

    def signatures(self, v) -> list[int]:
        """Per-table signature words for a vector."""
        vec = self._check_vector(v)
        bits = self._signature_bits(vec).reshape(self.config.tables, self.config.bits_per_signature)
        words = (bits.astype(np.uint64) * self._sig_weights).sum(axis=1, dtype=np.uint64)
        return [int(w) for w in words]

    def signature(self, table: int, v) -> int:
        if not 0 <= table < self.config.tables:
            raise InvalidInputError(f"table {table} out of range")
        return self.signatures(v)[table]

    def insert(self, item_id: str, v) -> None:
        if self._frozen:
            raise ConflictError("index is frozen")
        if item_id in self._id_to_row:
            raise ConflictError(f"duplicate item id {item_id!r}")
        vec = self._check_vector(v)
        row = len(self._ids)
        self._ids.append(item_id)
        self._id_to_row[item_id] = row
        self._packed.append(np.packbits(vec, bitorder="little"))
        self._pops.append(int(np.count_nonzero(vec)))
        for t, sig in enumerate(self.signatures(vec)):
            self._buckets[t].setdefault(sig, []).append(row)
        self._matrix = None
        self._pop_arr = None

    def freeze(self) -> None:
        self._frozen = True
        self._ensure_matrix()

    def bucket_sizes(self, table: int) -> list[int]:
        return [len(rows) for rows in self._buckets[table].values()]

    def _ensure_matrix(self) -> None:
        if self._matrix is None and self._ids:
            self._matrix = np.vstack(self._packed)
            self._pop_arr = np.array(self._pops, dtype=np.float64)

    def query(self, v, k: int) -> list[tuple[str, float]]:
        """Top-k (item id, exact cosine distance), ascending distance then id."""
        vec = self._check_vector(v)
        if k <= 0 or not self._ids:
            return []
        candidates: set[int] = set()
        for t, sig in enumerate(self.signatures(vec)):
            candidates.update(self._buckets[t].get(sig, ()))
        if len(candidates) >= k:
            rows = np.fromiter(sorted(candidates), dtype=np.intp, count=len(candidates))
        else:
            rows = np.arange(len(self._ids), dtype=np.intp)

        self._ensure_matrix()
        sub = self._matrix[rows]
        pops = self._pop_arr[rows]
        q = np.packbits(vec, bitorder="little")
        inter = _POPCOUNT[sub & q].sum(axis=1, dtype=np.int64)
        pq = int(np.count_nonzero(vec))
        if pq == 0:
            dists = np.where(pops == 0.0, 0.0, 1.0)
        else:
            # same arithmetic as masks.cosine_distance: sqrt of the exact product
            safe = np.where(pops == 0.0, 1.0, pops)
            dists = np.where(pops == 0.0, 1.0, 1.0 - inter / np.sqrt(pq * safe))

        ranked = sorted((float(dists[i]), self._ids[int(r)]) for i, r in enumerate(rows))
        return [(item, d) for d, item in ranked[:k]]

    def to_bytes(self) -> bytes:
        buf = bytearray()
        buf += _MAGIC
        write_u32(buf, _VERSION)
        write_u32(buf, self.config.tables)
        write_u32(buf, self.config.bits_per_signature)
        write_u64(buf, self.config.seed)
        write_u32(buf, self.config.vector_length)
        write_u64(buf, len(self._ids))
        for row, item_id in enumerate(self._ids):
            write_str(buf, item_id)
            buf += self._packed[row].tobytes()
        return bytes(buf)

    @classmethod
    def from_bytes(cls, data: bytes) -> "LshIndex":
        r = ByteReader(data)
        if r.raw(4) != _MAGIC:
            raise StorageError("not a signature index file")
        version = r.u32()
        if version != _VERSION:
            raise StorageError(f"unsupported signature index version {version}")
        config = LshConfig(
            tables=r.u32(),
            bits_per_signature=r.u32(),
            seed=r.u64(),
            vector_length=r.u32(),
        )
        index = cls(config)
        count = r.u64()
        vec_bytes = config.vector_length // 8
        for _ in range(count):
            item_id = r.str()
            raw = r.raw(vec_bytes)
            vec = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little").astype(bool)
            index.insert(item_id, vec)  # buckets are derived data, rebuilt here
        r.expect_eof()
        return index

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "LshIndex":
        return cls.from_bytes(Path(path).read_bytes())
