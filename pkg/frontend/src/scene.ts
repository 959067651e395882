/**
 * Turn a layout tree plus the current view state into a flat draw list.
 *
 * All rectangle geometry comes straight from the service; the only math
 * here is the contract's cell-to-pixel mapping (cells sit on the image
 * grid below each cluster's header band) and visual styling: depth color,
 * red outlines for misclassified thumbnails, translucency for whatever is
 * currently out of focus.
 */

import type { LayoutNode, LayoutTree, Size } from "./types.js";
import type { ViewState } from "./state.js";

export const TRANSLUCENT_OPACITY = 0.25;

/** Blues deepening with how much tree remains below a node. */
const DEPTH_RAMP = ["#f2f6fb", "#dbe7f5", "#c2d7ee", "#a5c4e4", "#86b0d9", "#679ccd", "#4a88c0", "#3173b1", "#205e9e", "#144a87"];

export function depthColor(depthRemaining: number): string {
  const idx = Math.min(Math.max(depthRemaining, 0), DEPTH_RAMP.length - 1);
  return DEPTH_RAMP[idx]!;
}

export interface SceneRect {
  nodeId: number;
  x: number;
  y: number;
  w: number;
  h: number;
  fill: string;
  isCutLeaf: boolean;
  depthRemaining: number;
  headerText: string | null;
}

export interface SceneImage {
  imageId: number;
  x: number;
  y: number;
  w: number;
  h: number;
  outlined: boolean;
  translucent: boolean;
  misclassified: boolean | null;
}

export interface Scene {
  viewport: Size;
  zoomRoot: number;
  rects: SceneRect[];
  images: SceneImage[];
}

export function formatHeader(imageCount: number, accuracy: number | null): string {
  const count = `${imageCount} image${imageCount === 1 ? "" : "s"}`;
  if (accuracy === null) return count;
  return `${count} · ${(accuracy * 100).toFixed(1)}% correct`;
}

/**
 * Compute the scene. `highlight`, when present, keeps only those image ids
 * opaque (class-table hover); the misclassification toggles come from the
 * view state. Identical inputs always produce an identical scene.
 */
export function computeScene(layout: LayoutTree, view: ViewState, highlight: ReadonlySet<number> | null = null): Scene {
  const rects: SceneRect[] = [];
  const images: SceneImage[] = [];

  const walk = (node: LayoutNode): void => {
    rects.push({
      nodeId: node.node_id,
      x: node.rect.x,
      y: node.rect.y,
      w: node.rect.w,
      h: node.rect.h,
      fill: depthColor(node.depth_remaining),
      isCutLeaf: node.is_cut_leaf,
      depthRemaining: node.depth_remaining,
      headerText: node.is_cut_leaf && node.header
        ? formatHeader(node.header.image_count, node.header.accuracy)
        : null,
    });
    if (node.is_cut_leaf) {
      for (const placement of node.placements ?? []) {
        const [col, row] = placement.cell;
        const misclassified = placement.misclassified;
        const dimmedByFocus = view.focusMisclassified && misclassified === false;
        const dimmedByHighlight = highlight !== null && !highlight.has(placement.image_id);
        images.push({
          imageId: placement.image_id,
          x: node.rect.x + col * layout.image.w,
          y: node.rect.y + layout.header_h + row * layout.image.h,
          w: layout.image.w,
          h: layout.image.h,
          outlined: view.outlineMisclassified && misclassified === true,
          translucent: dimmedByFocus || dimmedByHighlight,
          misclassified,
        });
      }
      return;
    }
    for (const child of node.children ?? []) walk(child);
  };

  walk(layout.root);
  return { viewport: layout.viewport, zoomRoot: layout.zoom_root, rects, images };
}

export function cutLeafRects(scene: Scene): SceneRect[] {
  return scene.rects.filter((r) => r.isCutLeaf);
}

/** Total images under the current zoom root (bounds the k slider). */
export function subtreeLeafCount(layout: LayoutTree): number {
  let total = 0;
  const walk = (node: LayoutNode): void => {
    if (node.is_cut_leaf) {
      total += node.header?.image_count ?? 0;
      return;
    }
    for (const child of node.children ?? []) walk(child);
  };
  walk(layout.root);
  return total;
}

/** The cluster rect (if any) that owns a click at viewport coordinates. */
export function hitTestCluster(scene: Scene, x: number, y: number): SceneRect | null {
  let best: SceneRect | null = null;
  for (const rect of cutLeafRects(scene)) {
    if (x >= rect.x && x < rect.x + rect.w && y >= rect.y && y < rect.y + rect.h) {
      best = rect;
    }
  }
  return best;
}
