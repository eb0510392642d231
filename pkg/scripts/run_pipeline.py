#!/usr/bin/env python3
"""Demo pipeline: generate a synthetic corpus, index it, and replay the
planted ground-truth queries, printing where each target landed.

Example:
    python3 scripts/run_pipeline.py --workdir /tmp/sloth-demo --videos 20 --frames 10
"""

import argparse
from pathlib import Path

from sloth_search.corpus import generate_corpus, load_ground_truth, planted_color_query
from sloth_search.engine import SearchEngine
from sloth_search.fusion import FusionWeights
from sloth_search.ingest import build_indexes, persist
from sloth_search.manifest import load_manifest


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", required=True)
    parser.add_argument("--videos", type=int, default=20)
    parser.add_argument("--frames", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    workdir = Path(args.workdir)
    corpus_dir = workdir / "corpus"
    index_dir = workdir / "index"

    summary = generate_corpus(corpus_dir, args.videos, args.frames, seed=args.seed)
    print(f"generated {summary.records} keyframes across {summary.videos} videos")

    bundle = build_indexes(load_manifest(summary.manifest_path), corpus_dir, seed=args.seed)
    persist(bundle, index_dir)
    print(f"index written to {index_dir} (skipped={len(bundle.skipped())})")

    engine = SearchEngine.load(index_dir)
    targets = load_ground_truth(corpus_dir / "ground_truth.jsonl")
    in_top10 = 0
    for target in targets:
        outcome = engine.search(
            text=target.caption_query,
            color_mask=planted_color_query(target).to_bytes(),
            weights=FusionWeights(1, 1, 0),
            limit=10,
        )
        ids = [h.keyframe for h in outcome.hits]
        rank = ids.index(target.keyframe_id) + 1 if target.keyframe_id in ids else None
        in_top10 += rank is not None
        print(f"  {target.keyframe_id}: rank {rank if rank else '>10'}")
    print(f"planted targets in top-10: {in_top10}/{len(targets)}")


if __name__ == "__main__":
    main()
