"""HTTP/JSON facade over the search engine.

Endpoints:
    POST /api/search                         combined query, flat or grouped
    GET  /api/videos/{video_id}/keyframes    shot view: all frames of a video
    GET  /api/keyframes/{id}/thumbnail       keyframe image bytes
    GET  /api/config                         palette, labels, defaults

Mask blobs travel base64-encoded in the canonical packed layout (8x32 bytes
for color, 10x32 for objects). Field names below are the wire contract.
"""

from __future__ import annotations

import base64
import binascii
import time
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse
from pydantic import BaseModel, Field

from .engine import DEFAULT_LIMIT, MAX_LIMIT, SearchEngine
from .errors import EmptyQueryError, InvalidInputError
from .fusion import FusionWeights, ScoredHit


class WeightsBody(BaseModel):
    w_t: float = Field(default=1.0, ge=0.0)
    w_c: float = Field(default=1.0, ge=0.0)
    w_o: float = Field(default=1.0, ge=0.0)


class SearchBody(BaseModel):
    text: Optional[str] = None
    color_mask: Optional[str] = None  # base64, 256 bytes decoded
    object_mask: Optional[str] = None  # base64, 320 bytes decoded
    weights: WeightsBody = WeightsBody()
    mode: Literal["flat", "grouped"] = "flat"
    limit: int = Field(default=DEFAULT_LIMIT, ge=1, le=MAX_LIMIT)


def _decode_b64(value: str | None, what: str) -> bytes | None:
    if value is None:
        return None
    try:
        return base64.b64decode(value, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"{what} is not valid base64") from exc


def _hit_json(engine: SearchEngine, hit: ScoredHit) -> dict:
    thumbnail = (
        f"/api/keyframes/{hit.keyframe}/thumbnail" if engine.has_thumbnail(hit.keyframe) else None
    )
    return {
        "keyframe_id": hit.keyframe,
        "video_id": hit.video,
        "sim_t": hit.sim_t,
        "dist_c": hit.dist_c,
        "dist_o": hit.dist_o,
        "sim_all": hit.sim_all,
        "thumbnail_url": thumbnail,
    }


def create_app(engine: SearchEngine) -> FastAPI:
    app = FastAPI(title="sloth-search")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.post("/api/search")
    def search(body: SearchBody):
        started = time.perf_counter()
        if body.text is None and body.color_mask is None and body.object_mask is None:
            raise HTTPException(status_code=400, detail="query needs text or a sketch mask")
        color_blob = _decode_b64(body.color_mask, "color_mask")
        object_blob = _decode_b64(body.object_mask, "object_mask")
        weights = FusionWeights(body.weights.w_t, body.weights.w_c, body.weights.w_o)
        try:
            outcome = engine.search(
                text=body.text,
                color_mask=color_blob,
                object_mask=object_blob,
                weights=weights,
                mode=body.mode,
                limit=body.limit,
            )
        except InvalidInputError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except EmptyQueryError as exc:
            # modality input was present, so this is a weights problem
            raise HTTPException(status_code=422, detail=str(exc)) from exc

        timing_ms = (time.perf_counter() - started) * 1000.0
        payload: dict = {
            "mode": outcome.mode,
            "timing_ms": timing_ms,
            "candidate_count": outcome.candidate_count,
        }
        if outcome.mode == "flat":
            payload["hits"] = [_hit_json(engine, h) for h in outcome.hits]
        else:
            payload["groups"] = [
                {
                    "video_id": group.video,
                    "group_score": group.group_score,
                    "hits": [_hit_json(engine, h) for h in group.hits],
                }
                for group in outcome.groups
            ]
        return payload

    @app.get("/api/videos/{video_id}/keyframes")
    def video_keyframes(video_id: str):
        members = engine.video_keyframes(video_id)
        if members is None:
            raise HTTPException(status_code=404, detail=f"unknown video {video_id!r}")
        return {
            "video_id": video_id,
            "keyframes": [
                {
                    "keyframe_id": kf,
                    "frame_index": frame_index,
                    "thumbnail_url": (
                        f"/api/keyframes/{kf}/thumbnail" if engine.has_thumbnail(kf) else None
                    ),
                }
                for kf, frame_index in members
            ],
        }

    @app.get("/api/keyframes/{keyframe_id}/thumbnail")
    def thumbnail(keyframe_id: str):
        path = engine.thumbnail_path(keyframe_id)
        if path is None or not path.is_file():
            raise HTTPException(status_code=404, detail=f"no thumbnail for {keyframe_id!r}")
        return FileResponse(path)

    @app.get("/api/config")
    def config():
        return engine.config_payload()

    return app


def serve(index_dir, host: str = "127.0.0.1", port: int = 8080) -> None:
    import uvicorn

    engine = SearchEngine.load(index_dir)
    uvicorn.run(create_app(engine), host=host, port=port)
