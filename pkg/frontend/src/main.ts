// Browser client: text box, 16x16 color sketch canvas, object box tool,
// weight sliders, flat/grouped result views, and a per-video shot view.

import { apiBase, fetchConfig, fetchVideoKeyframes, postSearch, thumbnailUrl } from "./api.js";
import { encodeSketch } from "./encode.js";
import { flatTiles, groupedRows, Tile } from "./render.js";
import {
  GRID,
  SketchState,
  Tool,
  addBox,
  clearSketch,
  emptySketch,
  paintCell,
} from "./sketch.js";
import { EngineConfig, SearchRequest, SearchResponse } from "./types.js";

const BASE = apiBase();
const CELL_PX = 24;
const CANVAS_PX = GRID * CELL_PX;

const sketch: SketchState = emptySketch();
let config: EngineConfig;
let tool: Tool = "paint";
let selectedColor = 0;
let selectedLabel = "person";
let mode: "flat" | "grouped" = "flat";
let inflight: AbortController | null = null;
let lastResponse: SearchResponse | null = null;
let dragStart: { x: number; y: number } | null = null;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text) node.textContent = text;
  return node;
}

function cssColor(anchor: [number, number, number]): string {
  return `rgb(${anchor[0]}, ${anchor[1]}, ${anchor[2]})`;
}

// ---------------------------------------------------------------- layout

document.body.innerHTML = `
  <h1>sloth search</h1>
  <div id="banner" class="banner hidden"></div>
  <div id="controls">
    <input id="text" type="text" placeholder="search text (objects, scenes, caption words)" size="48">
    <button id="go">Search</button>
    <label>mode
      <select id="mode">
        <option value="flat" selected>flat</option>
        <option value="grouped">grouped</option>
      </select>
    </label>
    <span id="weights"></span>
    <span id="status"></span>
  </div>
  <div id="workspace">
    <div id="sketch-pane">
      <div id="tools"></div>
      <canvas id="sketch" width="${CANVAS_PX}" height="${CANVAS_PX}"></canvas>
      <div id="boxes"></div>
    </div>
    <div id="results"></div>
  </div>
  <div id="shot-view" class="hidden"></div>
`;

const banner = document.getElementById("banner") as HTMLDivElement;
const textInput = document.getElementById("text") as HTMLInputElement;
const statusSpan = document.getElementById("status") as HTMLSpanElement;
const canvas = document.getElementById("sketch") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const resultsDiv = document.getElementById("results") as HTMLDivElement;
const boxesDiv = document.getElementById("boxes") as HTMLDivElement;
const shotView = document.getElementById("shot-view") as HTMLDivElement;

const weights = { w_t: 1.0, w_c: 1.0, w_o: 1.0 };

function buildWeightSliders(): void {
  const host = document.getElementById("weights") as HTMLSpanElement;
  for (const key of ["w_t", "w_c", "w_o"] as const) {
    const label = el("label", {}, ` ${key.replace("w_", "")} `);
    const slider = el("input", {
      type: "range", min: "0", max: "2", step: "0.1", value: String(weights[key]),
    });
    const value = el("span", {}, weights[key].toFixed(1));
    slider.oninput = () => {
      weights[key] = Number(slider.value);
      value.textContent = weights[key].toFixed(1);
    };
    label.append(slider, value);
    host.append(label);
  }
}

function buildTools(): void {
  const tools = document.getElementById("tools") as HTMLDivElement;
  for (const t of ["paint", "box", "erase"] as Tool[]) {
    const button = el("button", { "data-tool": t }, t);
    button.onclick = () => {
      tool = t;
      tools.querySelectorAll("button[data-tool]").forEach((b) =>
        b.classList.toggle("active", b.getAttribute("data-tool") === tool),
      );
    };
    if (t === tool) button.classList.add("active");
    tools.append(button);
  }

  const swatches = el("span", { id: "swatches" });
  config.palette.forEach((color, i) => {
    const swatch = el("button", { class: "swatch", title: color.name });
    swatch.style.background = cssColor(color.anchor);
    swatch.onclick = () => {
      selectedColor = i;
      swatches.querySelectorAll(".swatch").forEach((s, j) =>
        s.classList.toggle("active", j === i),
      );
    };
    if (i === selectedColor) swatch.classList.add("active");
    swatches.append(swatch);
  });
  tools.append(swatches);

  const labelSelect = el("select", { id: "label" });
  for (const label of config.object_labels) {
    labelSelect.append(el("option", { value: label }, label));
  }
  labelSelect.onchange = () => (selectedLabel = labelSelect.value);
  tools.append(labelSelect);

  const clear = el("button", {}, "clear sketch");
  clear.onclick = () => {
    clearSketch(sketch);
    renderBoxes();
    drawSketch();
  };
  tools.append(clear);
}

// ---------------------------------------------------------------- canvas

function drawSketch(): void {
  ctx.clearRect(0, 0, CANVAS_PX, CANVAS_PX);
  for (let r = 0; r < GRID; r++) {
    for (let c = 0; c < GRID; c++) {
      const color = sketch.cells[r * GRID + c];
      ctx.fillStyle = color === null ? "#f3f3f3" : cssColor(config.palette[color].anchor);
      ctx.fillRect(c * CELL_PX, r * CELL_PX, CELL_PX, CELL_PX);
    }
  }
  ctx.strokeStyle = "#ccc";
  for (let i = 0; i <= GRID; i++) {
    ctx.beginPath();
    ctx.moveTo(i * CELL_PX, 0);
    ctx.lineTo(i * CELL_PX, CANVAS_PX);
    ctx.moveTo(0, i * CELL_PX);
    ctx.lineTo(CANVAS_PX, i * CELL_PX);
    ctx.stroke();
  }
  ctx.strokeStyle = "#222";
  ctx.lineWidth = 2;
  for (const box of sketch.boxes) {
    ctx.strokeRect(
      box.x0 * CANVAS_PX,
      box.y0 * CANVAS_PX,
      (box.x1 - box.x0) * CANVAS_PX,
      (box.y1 - box.y0) * CANVAS_PX,
    );
    ctx.fillStyle = "#222";
    ctx.fillText(box.label, box.x0 * CANVAS_PX + 3, box.y0 * CANVAS_PX + 11);
  }
  ctx.lineWidth = 1;
}

function canvasPos(event: MouseEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return {
    x: Math.min(Math.max((event.clientX - rect.left) / rect.width, 0), 1),
    y: Math.min(Math.max((event.clientY - rect.top) / rect.height, 0), 1),
  };
}

function applyPaint(event: MouseEvent): void {
  const { x, y } = canvasPos(event);
  const col = Math.min(Math.floor(x * GRID), GRID - 1);
  const row = Math.min(Math.floor(y * GRID), GRID - 1);
  paintCell(sketch, row, col, tool === "erase" ? null : selectedColor);
  drawSketch();
}

canvas.onmousedown = (event) => {
  if (tool === "box") {
    dragStart = canvasPos(event);
  } else {
    applyPaint(event);
  }
};
canvas.onmousemove = (event) => {
  if (tool !== "box" && event.buttons === 1) applyPaint(event);
};
canvas.onmouseup = (event) => {
  if (tool !== "box" || dragStart === null) return;
  const end = canvasPos(event);
  const box = {
    label: selectedLabel,
    x0: Math.min(dragStart.x, end.x),
    y0: Math.min(dragStart.y, end.y),
    x1: Math.max(dragStart.x, end.x),
    y1: Math.max(dragStart.y, end.y),
  };
  dragStart = null;
  if (box.x1 - box.x0 >= 0.02 && box.y1 - box.y0 >= 0.02 && addBox(sketch, box)) {
    renderBoxes();
    drawSketch();
  }
};

function renderBoxes(): void {
  boxesDiv.innerHTML = "";
  sketch.boxes.forEach((box, i) => {
    const chip = el("span", { class: "box-chip" },
      `${box.label} [${box.x0.toFixed(2)},${box.y0.toFixed(2)} ${box.x1.toFixed(2)},${box.y1.toFixed(2)}]`);
    const remove = el("button", {}, "x");
    remove.onclick = () => {
      sketch.boxes.splice(i, 1);
      renderBoxes();
      drawSketch();
    };
    chip.append(remove);
    boxesDiv.append(chip);
  });
}

// ---------------------------------------------------------------- results

function showBanner(message: string): void {
  banner.textContent = message;
  banner.classList.remove("hidden");
}

function hideBanner(): void {
  banner.classList.add("hidden");
}

function tileNode(tile: Tile): HTMLDivElement {
  const node = el("div", { class: "tile", title: tile.tooltip });
  const url = thumbnailUrl(BASE, tile.thumbnailUrl);
  if (url) {
    node.append(el("img", { src: url, alt: tile.keyframeId }));
  } else {
    node.append(el("div", { class: "no-thumb" }, tile.keyframeId));
  }
  const caption = el("div", { class: "caption" });
  const videoLink = el("a", { href: "#" }, tile.videoId);
  videoLink.onclick = (event) => {
    event.preventDefault();
    openShotView(tile.videoId);
  };
  caption.append(videoLink, el("span", {}, ` ${tile.simAll.toFixed(3)}`));
  node.append(caption);
  return node;
}

function renderResults(response: SearchResponse): void {
  resultsDiv.innerHTML = "";
  if (response.mode === "flat") {
    const grid = el("div", { class: "grid" });
    for (const tile of flatTiles(response)) grid.append(tileNode(tile));
    resultsDiv.append(grid);
  } else {
    for (const row of groupedRows(response)) {
      const rowDiv = el("div", { class: "row" });
      const head = el("div", { class: "row-head" });
      const link = el("a", { href: "#" }, row.videoId);
      link.onclick = (event) => {
        event.preventDefault();
        openShotView(row.videoId);
      };
      head.append(link, el("span", {}, ` best ${row.groupScore.toFixed(3)}`));
      rowDiv.append(head);
      const strip = el("div", { class: "strip" });
      for (const tile of row.tiles) strip.append(tileNode(tile));
      rowDiv.append(strip);
      resultsDiv.append(rowDiv);
    }
  }
  statusSpan.textContent =
    `${response.candidate_count} candidates, ${response.timing_ms.toFixed(1)} ms`;
}

async function runQuery(): Promise<void> {
  const { colorMask, objectMask } = encodeSketch(sketch, config.object_labels);
  const text = textInput.value.trim();
  if (!text && colorMask === null && objectMask === null) {
    showBanner("nothing to search: enter text or draw a sketch");
    return;
  }
  const request: SearchRequest = { weights: { ...weights }, mode, limit: 100 };
  if (text) request.text = text;
  if (colorMask !== null) request.color_mask = colorMask;
  if (objectMask !== null) request.object_mask = objectMask;

  inflight?.abort(); // latest submission wins
  inflight = new AbortController();
  statusSpan.textContent = "searching...";
  try {
    const response = await postSearch(BASE, request, inflight.signal);
    lastResponse = response;
    hideBanner();
    renderResults(response);
  } catch (error) {
    if ((error as DOMException).name === "AbortError") return;
    showBanner(`search failed: ${(error as Error).message}`); // previous results stay up
    statusSpan.textContent = "";
  }
}

// ---------------------------------------------------------------- shot view

async function openShotView(videoId: string): Promise<void> {
  try {
    const payload = await fetchVideoKeyframes(BASE, videoId);
    shotView.innerHTML = "";
    const back = el("button", {}, "back to results");
    back.onclick = () => shotView.classList.add("hidden");
    shotView.append(back, el("h2", {}, `video ${payload.video_id} (${payload.keyframes.length} keyframes)`));
    const strip = el("div", { class: "strip" });
    for (const frame of payload.keyframes) {
      const cell = el("div", { class: "tile", title: frame.keyframe_id });
      const url = thumbnailUrl(BASE, frame.thumbnail_url);
      if (url) cell.append(el("img", { src: url, alt: frame.keyframe_id }));
      else cell.append(el("div", { class: "no-thumb" }, frame.keyframe_id));
      cell.append(el("div", { class: "caption" }, `#${frame.frame_index}`));
      strip.append(cell);
    }
    shotView.append(strip);
    shotView.classList.remove("hidden");
  } catch (error) {
    showBanner(`shot view failed: ${(error as Error).message}`);
  }
}

// ---------------------------------------------------------------- bootstrap

async function bootstrap(): Promise<void> {
  try {
    config = await fetchConfig(BASE);
  } catch (error) {
    showBanner(`cannot reach the engine at ${BASE || "this origin"}: ${(error as Error).message}`);
    return;
  }
  weights.w_t = config.default_weights.w_t;
  weights.w_c = config.default_weights.w_c;
  weights.w_o = config.default_weights.w_o;
  selectedLabel = config.object_labels[0];

  buildWeightSliders();
  buildTools();
  drawSketch();

  (document.getElementById("go") as HTMLButtonElement).onclick = () => void runQuery();
  textInput.onkeydown = (event) => {
    if (event.key === "Enter") void runQuery();
  };
  const modeSelect = document.getElementById("mode") as HTMLSelectElement;
  modeSelect.onchange = () => {
    mode = modeSelect.value as "flat" | "grouped";
    // mode flips re-query with the same inputs; the sketch is untouched
    if (lastResponse !== null) void runQuery();
  };
}

void bootstrap();
