#!/usr/bin/env python3
"""Sweep signature-index configurations over a synthetic corpus and report
recall@k plus latency against the exhaustive-scan oracle.

Example:
    python3 scripts/bench_lsh.py --items 10000 --queries 50 --k 10 \
        --tables 4 8 16 --bits 8 16 24
"""

import argparse
import json
import time

import numpy as np

from sloth_search.evaluate import evaluate_recall
from sloth_search.lsh import LshConfig, LshIndex


def build(items, density, tables, bits, seed):
    rng = np.random.default_rng(seed)
    vectors = rng.random((items, 2048)) < density
    index = LshIndex(LshConfig(tables=tables, bits_per_signature=bits, seed=seed))
    for i in range(items):
        index.insert(f"item{i:06d}", vectors[i])
    index.freeze()
    return index


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--items", type=int, default=10_000)
    parser.add_argument("--density", type=float, default=0.05)
    parser.add_argument("--queries", type=int, default=50)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--tables", type=int, nargs="+", default=[4, 8, 16])
    parser.add_argument("--bits", type=int, nargs="+", default=[8, 16, 24])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    for tables in args.tables:
        for bits in args.bits:
            started = time.perf_counter()
            index = build(args.items, args.density, tables, bits, args.seed)
            build_s = time.perf_counter() - started
            report = evaluate_recall(index, queries=args.queries, k=args.k, seed=args.seed)
            report["build_s"] = round(build_s, 2)
            print(json.dumps(report))


if __name__ == "__main__":
    main()
