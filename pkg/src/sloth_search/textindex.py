"""In-process inverted index with TF/IDF scoring over keyframe concept
annotations: object labels, scene labels, and caption text.

Scoring is the classic practical formula: sqrt(tf) * idf^2 / sqrt(doc_length)
summed over the query terms a document contains, with
idf(t) = 1 + ln(N / (df(t) + 1)). The +1 keeps idf finite for unseen terms
and positive for every term in the corpus, so returned scores are > 0.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .binio import ByteReader, write_str, write_u32, write_u64, write_uvarint
from .errors import ConflictError, InvalidInputError, StorageError

_MAGIC = b"STXT"
_VERSION = 1

_TOKEN_RE = re.compile(r"[^\W_]+")  # runs of alphanumerics; everything else splits


def tokenize(text: str) -> list[str]:
    """Lowercase and split on every non-alphanumeric character."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class ConceptAnnotations:
    """Upstream labels for one keyframe; confidences ride along unscored."""

    objects: tuple[tuple[str, float], ...] = ()
    scenes: tuple[tuple[str, float], ...] = ()
    caption: str = ""

    def __post_init__(self):
        object.__setattr__(self, "objects", self._clean(self.objects, "object"))
        object.__setattr__(self, "scenes", self._clean(self.scenes, "scene"))

    @staticmethod
    def _clean(pairs, kind: str) -> tuple[tuple[str, float], ...]:
        out = []
        for label, conf in pairs:
            label = str(label)
            conf = float(conf)
            if not label.strip():
                raise InvalidInputError(f"empty {kind} label")
            if not 0.0 <= conf <= 1.0:
                raise InvalidInputError(f"{kind} confidence {conf} outside [0, 1]")
            out.append((label, conf))
        return tuple(out)

    def term_bag(self) -> list[str]:
        terms = tokenize(self.caption)
        for label, _ in self.objects:
            terms.extend(tokenize(label))
        for label, _ in self.scenes:
            terms.extend(tokenize(label))
        return terms


class TextIndex:
    """Inverted index: single writer, freeze(), then any number of readers."""

    def __init__(self):
        self._postings: dict[str, list[tuple[int, int]]] = {}  # term -> [(ordinal, tf)]
        self._doc_ids: list[str] = []
        self._doc_lengths: list[int] = []
        self._ordinals: dict[str, int] = {}
        self._annotations: dict[str, ConceptAnnotations] = {}
        self._frozen = False

    def __len__(self) -> int:
        return len(self._doc_ids)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._ordinals

    def doc_length(self, doc_id: str) -> int:
        return self._doc_lengths[self._ordinals[doc_id]]

    def df(self, term: str) -> int:
        return len(self._postings.get(term, ()))

    def idf(self, term: str) -> float:
        return 1.0 + math.log(len(self._doc_ids) / (self.df(term) + 1))

    def annotations(self, doc_id: str) -> ConceptAnnotations | None:
        return self._annotations.get(doc_id)

    def add_document(self, doc_id: str, ann: ConceptAnnotations) -> None:
        if self._frozen:
            raise ConflictError("index is frozen")
        if doc_id in self._ordinals:
            raise ConflictError(f"duplicate document id {doc_id!r}")
        bag = ann.term_bag()
        ordinal = len(self._doc_ids)
        self._doc_ids.append(doc_id)
        self._doc_lengths.append(len(bag))
        self._ordinals[doc_id] = ordinal
        self._annotations[doc_id] = ann
        for term, tf in Counter(bag).items():
            self._postings.setdefault(term, []).append((ordinal, tf))

    def freeze(self) -> None:
        self._frozen = True

    def search(self, query: str, limit: int) -> list[tuple[str, float]]:
        """Top-`limit` (doc id, raw score), descending score then ascending id.

        Query terms are a bag with implicit OR; documents matching no term are
        omitted, so an all-unknown query yields an empty list.
        """
        if limit < 1:
            raise InvalidInputError("limit must be positive")
        scores: dict[int, float] = {}
        for term in tokenize(query):
            postings = self._postings.get(term)
            if not postings:
                continue
            w = self.idf(term)
            w2 = w * w
            for ordinal, tf in postings:
                contrib = math.sqrt(tf) * w2 / math.sqrt(self._doc_lengths[ordinal])
                scores[ordinal] = scores.get(ordinal, 0.0) + contrib
        ranked = sorted(
            ((self._doc_ids[o], s) for o, s in scores.items()),
            key=lambda hit: (-hit[1], hit[0]),
        )
        return ranked[:limit]

    def to_bytes(self) -> bytes:
        buf = bytearray()
        buf += _MAGIC
        write_u32(buf, _VERSION)
        write_u64(buf, len(self._doc_ids))
        for ordinal, doc_id in enumerate(self._doc_ids):
            write_str(buf, doc_id)
            write_u32(buf, self._doc_lengths[ordinal])
        write_u64(buf, len(self._postings))
        for term in sorted(self._postings):
            postings = self._postings[term]
            write_str(buf, term)
            write_uvarint(buf, len(postings))
            prev = 0
            for ordinal, tf in postings:
                write_uvarint(buf, ordinal - prev)  # delta over ascending ordinals
                write_uvarint(buf, tf)
                prev = ordinal
        return bytes(buf)

    @classmethod
    def from_bytes(cls, data: bytes) -> "TextIndex":
        r = ByteReader(data)
        if r.raw(4) != _MAGIC:
            raise StorageError("not a text index file")
        version = r.u32()
        if version != _VERSION:
            raise StorageError(f"unsupported text index version {version}")
        index = cls()
        doc_count = r.u64()
        for ordinal in range(doc_count):
            doc_id = r.str()
            length = r.u32()
            index._doc_ids.append(doc_id)
            index._doc_lengths.append(length)
            index._ordinals[doc_id] = ordinal
        term_count = r.u64()
        for _ in range(term_count):
            term = r.str()
            df = r.uvarint()
            postings = []
            prev = 0
            for _ in range(df):
                prev += r.uvarint()
                tf = r.uvarint()
                postings.append((prev, tf))
            index._postings[term] = postings
        r.expect_eof()
        return index

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "TextIndex":
        return cls.from_bytes(Path(path).read_bytes())


def normalize_scores(hits: list[tuple[str, float]]) -> list[tuple[str, float]]:
    """Scale a descending raw-score list so the best hit scores exactly 1.0."""
    if not hits:
        return []
    top = hits[0][1]
    return [(doc_id, score / top) for doc_id, score in hits]
