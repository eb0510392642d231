// Sketch state -> packed mask blobs in the engine's canonical layout:
// per mask 256 bits row-major, bit i in byte i>>3 at position i&7, masks
// concatenated in palette / label order, then base64. The server treats
// these bytes as authoritative, so this file must stay in lockstep with its
// decoder (pinned by tests/fixtures/sketch_fixtures.json).

import { CELLS, GRAY_INDEX, GRID, SketchState, hasPaintedCells } from "./sketch.js";

export const PALETTE_SIZE = 8;
export const COLOR_BLOB_BYTES = (PALETTE_SIZE * CELLS) / 8; // 256

function setBit(bytes: Uint8Array, bit: number): void {
  bytes[bit >> 3] |= 1 << (bit & 7);
}

function getBit(bytes: Uint8Array, bit: number): boolean {
  return (bytes[bit >> 3] & (1 << (bit & 7))) !== 0;
}

export function toBase64(bytes: Uint8Array): string {
  let binary = "";
  for (const b of bytes) binary += String.fromCharCode(b);
  return btoa(binary);
}

export function fromBase64(value: string): Uint8Array {
  const binary = atob(value);
  const bytes = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) bytes[i] = binary.charCodeAt(i);
  return bytes;
}

/** Painted cells -> 8x32-byte color blob; untouched cells become gray.
 *  A fully empty grid sends no blob at all. */
export function encodeColorMask(state: SketchState): string | null {
  if (!hasPaintedCells(state)) return null;
  const bytes = new Uint8Array(COLOR_BLOB_BYTES);
  for (let cell = 0; cell < CELLS; cell++) {
    const color = state.cells[cell] ?? GRAY_INDEX;
    setBit(bytes, color * CELLS + cell);
  }
  return toBase64(bytes);
}

/** Cells covered by a box under the any-positive-overlap rule. */
export function boxCellRange(lo: number, hi: number): [number, number] {
  const start = Math.max(Math.floor(lo * GRID), 0);
  const stop = Math.min(Math.ceil(hi * GRID) - 1, GRID - 1);
  return [start, stop];
}

/** Boxes -> 10x32-byte object blob; no boxes sends no blob. */
export function encodeObjectMask(state: SketchState, labels: string[]): string | null {
  if (state.boxes.length === 0) return null;
  const bytes = new Uint8Array((labels.length * CELLS) / 8);
  for (const box of state.boxes) {
    const idx = labels.indexOf(box.label.trim().toLowerCase());
    if (idx < 0) continue;
    const [c0, c1] = boxCellRange(box.x0, box.x1);
    const [r0, r1] = boxCellRange(box.y0, box.y1);
    for (let r = r0; r <= r1; r++) {
      for (let c = c0; c <= c1; c++) {
        setBit(bytes, idx * CELLS + r * GRID + c);
      }
    }
  }
  return toBase64(bytes);
}

export function encodeSketch(
  state: SketchState,
  labels: string[],
): { colorMask: string | null; objectMask: string | null } {
  return { colorMask: encodeColorMask(state), objectMask: encodeObjectMask(state, labels) };
}

// Decoders are used by the round-trip tests (and debugging); the engine has
// its own, which these mirror.

export function decodeColorMask(blob: string): number[] {
  const bytes = fromBase64(blob);
  if (bytes.length !== COLOR_BLOB_BYTES) {
    throw new Error(`color blob must be ${COLOR_BLOB_BYTES} bytes, got ${bytes.length}`);
  }
  const cells = new Array<number>(CELLS).fill(-1);
  for (let color = 0; color < PALETTE_SIZE; color++) {
    for (let cell = 0; cell < CELLS; cell++) {
      if (getBit(bytes, color * CELLS + cell)) {
        if (cells[cell] !== -1) throw new Error(`cell ${cell} set in two colors`);
        cells[cell] = color;
      }
    }
  }
  if (cells.some((c) => c === -1)) throw new Error("color blob does not cover the grid");
  return cells;
}

export function decodeObjectMask(blob: string, labelCount: number): boolean[][] {
  const bytes = fromBase64(blob);
  const expected = (labelCount * CELLS) / 8;
  if (bytes.length !== expected) {
    throw new Error(`object blob must be ${expected} bytes, got ${bytes.length}`);
  }
  const masks: boolean[][] = [];
  for (let idx = 0; idx < labelCount; idx++) {
    const mask = new Array<boolean>(CELLS);
    for (let cell = 0; cell < CELLS; cell++) {
      mask[cell] = getBit(bytes, idx * CELLS + cell);
    }
    masks.push(mask);
  }
  return masks;
}
