/**
 * Zoom transition geometry: interpolate the clicked cluster's rectangle
 * onto the full viewport (and back out). Any smooth easing works as long
 * as the endpoints are exact, which the tests pin.
 */

import type { Rect, Size } from "./types.js";

export const ZOOM_DURATION_MS = 450;

export function easeCubicInOut(t: number): number {
  const x = Math.min(Math.max(t, 0), 1);
  return x < 0.5 ? 4 * x * x * x : 1 - Math.pow(-2 * x + 2, 3) / 2;
}

export function lerp(a: number, b: number, t: number): number {
  return t >= 1 ? b : a + (b - a) * t;
}

export function interpolateRect(from: Rect, to: Rect, t: number): Rect {
  const e = easeCubicInOut(t);
  return {
    x: lerp(from.x, to.x, e),
    y: lerp(from.y, to.y, e),
    w: lerp(from.w, to.w, e),
    h: lerp(from.h, to.h, e),
  };
}

export function viewportRect(viewport: Size): Rect {
  return { x: 0, y: 0, w: viewport.w, h: viewport.h };
}

/**
 * Frames for a zoom-in: the selected cluster's rect grows to cover the
 * viewport. The first frame is exactly `from`, the last exactly the full
 * viewport.
 */
export function zoomFrames(from: Rect, viewport: Size, steps: number): Rect[] {
  if (steps < 2) throw new RangeError("a transition needs at least 2 frames");
  const target = viewportRect(viewport);
  const frames: Rect[] = [];
  for (let i = 0; i < steps; i++) {
    frames.push(interpolateRect(from, target, i / (steps - 1)));
  }
  return frames;
}

/** Frames for a zoom-out: the viewport shrinks back into the parent rect. */
export function zoomOutFrames(to: Rect, viewport: Size, steps: number): Rect[] {
  return zoomFrames(to, viewport, steps).reverse();
}
