// Wire types mirroring the engine's JSON payloads (snake_case is the contract).

export interface PaletteEntry {
  name: string;
  anchor: [number, number, number];
}

export interface EngineConfig {
  grid_size: number;
  palette: PaletteEntry[];
  object_labels: string[];
  default_weights: { w_t: number; w_c: number; w_o: number };
  color_mask_bytes: number;
  object_mask_bytes: number;
}

export interface HitPayload {
  keyframe_id: string;
  video_id: string;
  sim_t: number | null;
  dist_c: number | null;
  dist_o: number | null;
  sim_all: number;
  thumbnail_url: string | null;
}

export interface GroupPayload {
  video_id: string;
  group_score: number;
  hits: HitPayload[];
}

export interface SearchResponse {
  mode: "flat" | "grouped";
  timing_ms: number;
  candidate_count: number;
  hits?: HitPayload[];
  groups?: GroupPayload[];
}

export interface KeyframeEntry {
  keyframe_id: string;
  frame_index: number;
  thumbnail_url: string | null;
}

export interface VideoKeyframesResponse {
  video_id: string;
  keyframes: KeyframeEntry[];
}

export interface SearchRequest {
  text?: string;
  color_mask?: string;
  object_mask?: string;
  weights: { w_t: number; w_c: number; w_o: number };
  mode: "flat" | "grouped";
  limit: number;
}
