/**
 * Browser entry: mounts the explorer onto index.html and translates DOM
 * events into controller calls. All layout geometry arrives from the
 * service; this file only renders and dispatches.
 */

import { createHttpClient } from "./api.js";
import { ZOOM_DURATION_MS, easeCubicInOut, interpolateRect, viewportRect } from "./animate.js";
import type { ClassColumn } from "./classTable.js";
import { filterRows, sortRows } from "./classTable.js";
import type { DetailModel } from "./detail.js";
import { ExplorerController } from "./controller.js";
import { hitTestCluster } from "./scene.js";
import type { Scene } from "./scene.js";
import { renderSvg } from "./render.js";
import type { ClassRow, LayoutTree, Rect } from "./types.js";

const VIEWPORT_W = 1200;
const VIEWPORT_H = 800;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

function animateZoom(svgHost: HTMLElement, focus: Rect, kind: "in" | "out"): Promise<void> {
  // Scale the old drawing so the focus rect appears to grow onto (or shrink
  // back from) the viewport while the fresh layout fades in underneath.
  const target = viewportRect({ w: VIEWPORT_W, h: VIEWPORT_H });
  const start = performance.now();
  return new Promise((resolve) => {
    const tick = (now: number) => {
      const t = Math.min((now - start) / ZOOM_DURATION_MS, 1);
      const e = easeCubicInOut(kind === "in" ? t : 1 - t);
      const frame = interpolateRect(focus, target, e);
      const sx = frame.w / Math.max(focus.w, 1);
      const sy = frame.h / Math.max(focus.h, 1);
      svgHost.style.transformOrigin = "0 0";
      svgHost.style.transform = `translate(${frame.x - focus.x * sx}px, ${frame.y - focus.y * sy}px) scale(${sx}, ${sy})`;
      if (t < 1) {
        requestAnimationFrame(tick);
      } else {
        svgHost.style.transform = "";
        resolve();
      }
    };
    requestAnimationFrame(tick);
  });
}

function renderDetail(host: HTMLElement, detail: DetailModel | null): void {
  if (!detail) {
    host.innerHTML = '<p class="hint">Click an image for details.</p>';
    return;
  }
  const predicted =
    detail.predictedLabel === null
      ? ""
      : `<dt>Predicted</dt><dd class="${detail.misclassified ? "wrong" : "right"}">${detail.predictedLabel}</dd>`;
  host.innerHTML = `
    <img class="detail-image" src="${detail.imageUrl}" alt="image ${detail.imageId}"/>
    <dl><dt>True class</dt><dd>${detail.trueLabel}</dd>${predicted}</dl>
    <h3>Similar images</h3>
    <div class="neighbors">
      ${detail.neighbors
        .map((n) => `<img src="${n.url}" title="#${n.id} · d=${n.distance.toFixed(3)}" data-image="${n.id}"/>`)
        .join("")}
    </div>`;
}

function formatRate(value: number | null): string {
  return value === null ? "–" : `${(value * 100).toFixed(1)}%`;
}

interface TableState {
  rows: ClassRow[];
  column: ClassColumn;
  direction: "asc" | "desc";
  search: string;
}

function renderClassTable(host: HTMLElement, table: TableState): void {
  const rows = sortRows(filterRows(table.rows, table.search), table.column, table.direction);
  host.innerHTML = `
    <table>
      <thead><tr>
        <th data-col="class_name">class</th>
        <th data-col="true_count">true</th>
        <th data-col="predicted_count">pred</th>
        <th data-col="accuracy">acc</th>
        <th data-col="false_negative_rate">fnr</th>
        <th data-col="false_positive_rate">fpr</th>
      </tr></thead>
      <tbody>
        ${rows
          .map(
            (row) => `<tr data-class="${row.class_id}">
              <td data-col="class_name">${row.class_name}</td>
              <td data-col="true_count">${row.true_count}</td>
              <td data-col="predicted_count">${row.predicted_count}</td>
              <td data-col="accuracy">${formatRate(row.accuracy)}</td>
              <td data-col="false_negative_rate">${formatRate(row.false_negative_rate)}</td>
              <td data-col="false_positive_rate">${formatRate(row.false_positive_rate)}</td>
            </tr>`,
          )
          .join("")}
      </tbody>
    </table>`;
}

async function boot(): Promise<void> {
  const api = createHttpClient(el<HTMLElement>("app").dataset.api ?? "");
  const svgHost = el<HTMLDivElement>("treemap");
  const detailHost = el<HTMLDivElement>("detail");
  const tableHost = el<HTMLDivElement>("class-table");
  const kSlider = el<HTMLInputElement>("k-slider");
  const kLabel = el<HTMLSpanElement>("k-label");
  const sizeSlider = el<HTMLInputElement>("size-slider");
  const outlineToggle = el<HTMLInputElement>("outline-toggle");
  const focusToggle = el<HTMLInputElement>("focus-toggle");

  let scene: Scene | null = null;
  const tableState: TableState = { rows: [], column: "class_name", direction: "asc", search: "" };

  const controller = new ExplorerController(
    api,
    {
      onScene: (next: Scene, layout: LayoutTree) => {
        scene = next;
        svgHost.innerHTML = renderSvg(next, api.imageUrl, layout.header_h);
        kSlider.max = String(Math.max(controller.currentLeafCount, 1));
        kSlider.value = String(controller.state.view.clustersVisible);
        kLabel.textContent = String(controller.state.view.clustersVisible);
        void refreshTable();
      },
      onTransition: (transition) => void animateZoom(svgHost, transition.focusRect, transition.kind),
      onDetail: (detail) => renderDetail(detailHost, detail),
      onError: (error) => {
        console.error(error);
        el<HTMLDivElement>("status").textContent = String(error);
      },
    },
    { viewportW: VIEWPORT_W, viewportH: VIEWPORT_H },
  );

  async function refreshTable(): Promise<void> {
    if (!controller.dataset.has_predictions) {
      tableHost.innerHTML = '<p class="hint">No model predictions in this dataset.</p>';
      return;
    }
    const body = await controller.fetchClassTable();
    tableState.rows = body.rows;
    renderClassTable(tableHost, tableState);
  }

  svgHost.addEventListener("click", (event) => {
    const target = event.target as Element;
    const imageId = target.getAttribute("data-image");
    if (imageId !== null) {
      void controller.selectImage(Number(imageId));
      return;
    }
    if (!scene) return;
    const bounds = svgHost.querySelector("svg")?.getBoundingClientRect();
    if (!bounds) return;
    const x = ((event.clientX - bounds.left) / bounds.width) * VIEWPORT_W;
    const y = ((event.clientY - bounds.top) / bounds.height) * VIEWPORT_H;
    const cluster = hitTestCluster(scene, x, y);
    void controller.handleClusterClick(cluster ? cluster.nodeId : controller.state.view.currentNode);
  });

  kSlider.addEventListener("change", () => void controller.setClustersVisible(Number(kSlider.value)));
  sizeSlider.addEventListener("change", () => void controller.setImageSize(Number(sizeSlider.value)));
  outlineToggle.addEventListener("change", () => controller.toggleOutlineMisclassified());
  focusToggle.addEventListener("change", () => controller.toggleFocusMisclassified());

  tableHost.addEventListener("mouseover", (event) => {
    const cell = (event.target as Element).closest("td");
    const row = (event.target as Element).closest("tr[data-class]");
    if (row) {
      const column = (cell?.getAttribute("data-col") ?? "class_name") as ClassColumn;
      controller.hoverClassEntry(Number(row.getAttribute("data-class")), column);
    }
  });
  tableHost.addEventListener("mouseleave", () => controller.hoverClassEntry(null));
  tableHost.addEventListener("click", (event) => {
    const header = (event.target as Element).closest("th[data-col]");
    if (!header) return;
    const column = header.getAttribute("data-col") as ClassColumn;
    tableState.direction = tableState.column === column && tableState.direction === "asc" ? "desc" : "asc";
    tableState.column = column;
    renderClassTable(tableHost, tableState);
  });
  el<HTMLInputElement>("class-search").addEventListener("input", (event) => {
    tableState.search = (event.target as HTMLInputElement).value;
    renderClassTable(tableHost, tableState);
  });

  detailHost.addEventListener("click", (event) => {
    const imageId = (event.target as Element).getAttribute("data-image");
    if (imageId !== null) void controller.selectImage(Number(imageId));
  });

  await controller.start();
}

void boot();
