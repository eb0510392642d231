"""Operator command line: index building, serving, ad-hoc querying, recall
evaluation, and synthetic corpus generation.

Exit codes: 0 success, 1 IO/config error, 2 invalid (empty) query.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .corpus import generate_corpus
from .engine import SearchEngine
from .errors import ConfigError, EmptyQueryError, InvalidInputError, ManifestError, StorageError
from .evaluate import evaluate_recall
from .fusion import FusionWeights
from .ingest import build_indexes, persist
from .lsh import LshIndex
from .manifest import load_manifest

INDEX_DIR_ENV = "SLOTH_INDEX_DIR"


def _index_dir_from(args) -> str:
    if args.index:
        return args.index
    env = os.environ.get(INDEX_DIR_ENV)
    if env:
        return env
    raise ConfigError(f"no index directory: pass --index or set {INDEX_DIR_ENV}")


def cmd_index(args) -> int:
    started = time.perf_counter()
    manifest = load_manifest(args.manifest)
    bundle = build_indexes(manifest, args.images, seed=args.seed)
    persist(bundle, args.out)
    elapsed = time.perf_counter() - started
    skipped = len(bundle.skipped())
    indexed = len(manifest.records)
    print(f"indexed={indexed} skipped={skipped} elapsed={elapsed:.2f}s")
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    serve(_index_dir_from(args), host=args.host, port=args.port)
    return 0


def _parse_weights(raw: str) -> FusionWeights:
    parts = raw.split(",")
    if len(parts) != 3:
        raise InvalidInputError("weights must be three comma-separated numbers: T,C,O")
    try:
        w_t, w_c, w_o = (float(p) for p in parts)
    except ValueError as exc:
        raise InvalidInputError(f"bad weights {raw!r}") from exc
    return FusionWeights(w_t, w_c, w_o)


def _hit_line(hit) -> dict:
    return {
        "keyframe_id": hit.keyframe,
        "video_id": hit.video,
        "sim_t": hit.sim_t,
        "dist_c": hit.dist_c,
        "dist_o": hit.dist_o,
        "sim_all": hit.sim_all,
    }


def cmd_query(args) -> int:
    engine = SearchEngine.load(_index_dir_from(args))
    color_mask = Path(args.color_mask).read_bytes() if args.color_mask else None
    object_mask = Path(args.object_mask).read_bytes() if args.object_mask else None
    outcome = engine.search(
        text=args.text,
        color_mask=color_mask,
        object_mask=object_mask,
        weights=_parse_weights(args.weights),
        mode=args.mode,
        limit=args.limit,
    )
    if outcome.mode == "flat":
        for hit in outcome.hits:
            print(json.dumps(_hit_line(hit)))
    else:
        for group in outcome.groups:
            print(json.dumps({"type": "group", "video_id": group.video, "group_score": group.group_score}))
            for hit in group.hits:
                print(json.dumps({"type": "hit", **_hit_line(hit)}))
    return 0


def cmd_eval(args) -> int:
    index_path = Path(_index_dir_from(args)) / "color.lsh"
    index = LshIndex.load(index_path)
    index.freeze()
    report = evaluate_recall(index, queries=args.queries, k=args.k, seed=args.seed)
    print(json.dumps(report))
    return 0


def cmd_gen_corpus(args) -> int:
    summary = generate_corpus(args.out, args.videos, args.frames_per_video, seed=args.seed)
    print(
        f"records={summary.records} videos={summary.videos} "
        f"planted={len(summary.planted)} manifest={summary.manifest_path}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sloth", description="video keyframe retrieval engine")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("index", help="build an index directory from a manifest")
    p.add_argument("--manifest", required=True, help="manifest path (one JSON record per line)")
    p.add_argument("--images", required=True, help="root directory for image paths")
    p.add_argument("--out", required=True, help="output index directory")
    p.add_argument("--seed", type=int, default=0, help="signature seed")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("serve", help="serve the HTTP API over a built index")
    p.add_argument("--index", help=f"index directory (default: ${INDEX_DIR_ENV})")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("query", help="run one query and print hits as JSON lines")
    p.add_argument("--index", help=f"index directory (default: ${INDEX_DIR_ENV})")
    p.add_argument("--text")
    p.add_argument("--color-mask", help="file with 256 raw mask bytes")
    p.add_argument("--object-mask", help="file with 320 raw mask bytes")
    p.add_argument("--weights", default="1,1,1", help="T,C,O")
    p.add_argument("--mode", choices=("flat", "grouped"), default="flat")
    p.add_argument("--limit", type=int, default=100)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", help="recall@k of the color sketch index vs. exhaustive scan")
    p.add_argument("--index", help=f"index directory (default: ${INDEX_DIR_ENV})")
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen-corpus", help="write a synthetic keyframe corpus with ground truth")
    p.add_argument("--out", required=True)
    p.add_argument("--videos", type=int, required=True)
    p.add_argument("--frames-per-video", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_corpus)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyQueryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ManifestError, StorageError, ConfigError, InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())
