// Sketch state: a 16x16 cell grid (each cell empty or one palette color)
// plus labeled normalized boxes. The grid works at the index's native
// resolution, so what you paint is exactly what gets matched.

export const GRID = 16;
export const CELLS = GRID * GRID;
export const GRAY_INDEX = 7; // untouched cells resolve to gray at encode time

export type Tool = "paint" | "box" | "erase";

export interface SketchBox {
  label: string;
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface SketchState {
  cells: (number | null)[]; // palette index per cell, row-major, null = untouched
  boxes: SketchBox[];
}

export function emptySketch(): SketchState {
  return { cells: new Array(CELLS).fill(null), boxes: [] };
}

export function paintCell(state: SketchState, row: number, col: number, color: number | null): void {
  if (row < 0 || row >= GRID || col < 0 || col >= GRID) return;
  state.cells[row * GRID + col] = color;
}

export function hasPaintedCells(state: SketchState): boolean {
  return state.cells.some((c) => c !== null);
}

export function clearSketch(state: SketchState): void {
  state.cells.fill(null);
  state.boxes = [];
}

export function validBox(box: SketchBox): boolean {
  return box.x0 >= 0 && box.x0 < box.x1 && box.x1 <= 1 && box.y0 >= 0 && box.y0 < box.y1 && box.y1 <= 1;
}

export function addBox(state: SketchState, box: SketchBox): boolean {
  if (!validBox(box)) return false;
  state.boxes.push(box);
  return true;
}
