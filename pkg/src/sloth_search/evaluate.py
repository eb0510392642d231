"""Recall benchmarking of the signature index against a brute-force scan."""

from __future__ import annotations

import time

import numpy as np

from .lsh import LshIndex
from .masks import cosine_distance


def exhaustive_top_k(index: LshIndex, v, k: int) -> list[tuple[str, float]]:
    """Linear-scan oracle: walks every stored vector and scores it with
    cosine_distance directly, no signatures involved."""
    scored = []
    for item_id in index.item_ids():
        scored.append((cosine_distance(v, index.vector(item_id)), item_id))
    scored.sort()
    return [(item_id, d) for d, item_id in scored[:k]]


def evaluate_recall(index: LshIndex, queries: int, k: int, seed: int = 0) -> dict:
    """Sample indexed vectors as queries and measure recall@k vs. the oracle.

    Recall numbers are deterministic for a fixed (index, seed); the latency
    percentiles are wall-clock and of course are not.
    """
    ids = index.item_ids()
    rng = np.random.default_rng(seed)
    take = min(queries, len(ids))
    picks = rng.choice(len(ids), size=take, replace=False)

    recalls = []
    latencies_ms = []
    for row in picks:
        query_id = ids[int(row)]
        v = index.vector(query_id)
        started = time.perf_counter()
        hits = index.query(v, k)
        latencies_ms.append((time.perf_counter() - started) * 1000.0)
        truth = {item_id for item_id, _ in exhaustive_top_k(index, v, k)}
        got = {item_id for item_id, _ in hits}
        recalls.append(len(got & truth) / k)

    return {
        "items": len(ids),
        "queries": take,
        "k": k,
        "seed": seed,
        "tables": index.config.tables,
        "bits_per_signature": index.config.bits_per_signature,
        "mean_recall": float(np.mean(recalls)) if recalls else 0.0,
        "latency_ms": {
            "p50": float(np.percentile(latencies_ms, 50)) if latencies_ms else 0.0,
            "p95": float(np.percentile(latencies_ms, 95)) if latencies_ms else 0.0,
            "p99": float(np.percentile(latencies_ms, 99)) if latencies_ms else 0.0,
        },
    }
