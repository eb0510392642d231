// Thin fetch wrappers over the engine's HTTP API. The base URL defaults to
// same-origin and can be overridden with ?api=http://host:port when the
// static bundle is served separately from the engine.

import { EngineConfig, SearchRequest, SearchResponse, VideoKeyframesResponse } from "./types.js";

export function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  return param ? param.replace(/\/$/, "") : "";
}

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`${response.status}: ${await response.text()}`);
  }
  return (await response.json()) as T;
}

export function fetchConfig(base: string): Promise<EngineConfig> {
  return getJson<EngineConfig>(`${base}/api/config`);
}

export function fetchVideoKeyframes(base: string, videoId: string): Promise<VideoKeyframesResponse> {
  return getJson<VideoKeyframesResponse>(`${base}/api/videos/${encodeURIComponent(videoId)}/keyframes`);
}

export async function postSearch(
  base: string,
  request: SearchRequest,
  signal?: AbortSignal,
): Promise<SearchResponse> {
  const response = await fetch(`${base}/api/search`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(request),
    signal,
  });
  if (!response.ok) {
    let detail = `${response.status}`;
    try {
      const body = await response.json();
      if (body?.detail) detail = `${response.status}: ${JSON.stringify(body.detail)}`;
    } catch {
      // keep the bare status
    }
    throw new Error(detail);
  }
  return (await response.json()) as SearchResponse;
}

export function thumbnailUrl(base: string, relative: string | null): string | null {
  return relative === null ? null : `${base}${relative}`;
}
