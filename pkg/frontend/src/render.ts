// Pure payload -> view-model mapping. The UI never rescores or reorders:
// every number and position shown comes straight from the response.

import { GroupPayload, HitPayload, SearchResponse } from "./types.js";

export interface Tile {
  keyframeId: string;
  videoId: string;
  simAll: number;
  thumbnailUrl: string | null;
  tooltip: string;
}

export interface Row {
  videoId: string;
  groupScore: number;
  tiles: Tile[];
}

function fmt(value: number | null): string {
  return value === null ? "-" : value.toFixed(3);
}

export function tileFromHit(hit: HitPayload): Tile {
  return {
    keyframeId: hit.keyframe_id,
    videoId: hit.video_id,
    simAll: hit.sim_all,
    thumbnailUrl: hit.thumbnail_url,
    tooltip:
      `${hit.keyframe_id}  sim_all=${fmt(hit.sim_all)}` +
      ` (text=${fmt(hit.sim_t)} color_d=${fmt(hit.dist_c)} object_d=${fmt(hit.dist_o)})`,
  };
}

export function flatTiles(response: SearchResponse): Tile[] {
  return (response.hits ?? []).map(tileFromHit);
}

export function groupedRows(response: SearchResponse): Row[] {
  return (response.groups ?? []).map((group: GroupPayload) => ({
    videoId: group.video_id,
    groupScore: group.group_score,
    tiles: group.hits.map(tileFromHit),
  }));
}
