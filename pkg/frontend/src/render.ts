/**
 * SVG markup for a scene. Pure string construction so rendering is
 * testable without a DOM; the browser entry assigns the result to
 * innerHTML and wires event delegation by data attributes.
 */

import type { Scene, SceneImage, SceneRect } from "./scene.js";
import { TRANSLUCENT_OPACITY } from "./scene.js";

export const MISCLASSIFIED_STROKE = "#d62728";

function escapeAttr(value: string): string {
  return value.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

function rectSvg(rect: SceneRect, headerH: number): string {
  const parts = [
    `<rect class="cluster${rect.isCutLeaf ? " cluster-leaf" : ""}" data-node="${rect.nodeId}" ` +
      `x="${rect.x}" y="${rect.y}" width="${rect.w}" height="${rect.h}" ` +
      `fill="${rect.fill}" stroke="#4a5a6a" stroke-width="1"/>`,
  ];
  if (rect.headerText !== null) {
    const tx = rect.x + 4;
    const ty = rect.y + Math.max(headerH - 6, 10);
    parts.push(
      `<text class="cluster-header" data-node="${rect.nodeId}" x="${tx}" y="${ty}" ` +
        `font-size="${Math.max(headerH - 8, 8)}">${escapeAttr(rect.headerText)}</text>`,
    );
  }
  return parts.join("");
}

function imageSvg(image: SceneImage, imageUrl: (id: number) => string): string {
  const opacity = image.translucent ? ` opacity="${TRANSLUCENT_OPACITY}"` : "";
  const parts = [
    `<image class="thumb" data-image="${image.imageId}" x="${image.x}" y="${image.y}" ` +
      `width="${image.w}" height="${image.h}" href="${escapeAttr(imageUrl(image.imageId))}" ` +
      `preserveAspectRatio="xMidYMid slice"${opacity}/>`,
  ];
  if (image.outlined) {
    parts.push(
      `<rect class="thumb-outline" data-image="${image.imageId}" x="${image.x + 1}" y="${image.y + 1}" ` +
        `width="${image.w - 2}" height="${image.h - 2}" fill="none" ` +
        `stroke="${MISCLASSIFIED_STROKE}" stroke-width="2"${opacity}/>`,
    );
  }
  return parts.join("");
}

export function renderSvg(scene: Scene, imageUrl: (id: number) => string, headerH: number): string {
  const body = [
    ...scene.rects.map((rect) => rectSvg(rect, headerH)),
    ...scene.images.map((image) => imageSvg(image, imageUrl)),
  ].join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${scene.viewport.w} ${scene.viewport.h}" ` +
    `width="${scene.viewport.w}" height="${scene.viewport.h}" data-zoom-root="${scene.zoomRoot}">\n${body}\n</svg>`
  );
}
