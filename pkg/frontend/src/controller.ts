/**
 * Wires the API client, the view state, and the renderer together.
 *
 * The controller owns one ExplorerState and one cached layout. Interactions
 * that change server-side geometry (zoom, k slider, image size) fetch a new
 * layout; purely visual interactions (misclassification toggles, hover
 * highlights, selection) re-style the cached one. At most one layout
 * request is live: responses arriving after a newer request are dropped.
 */

import type { ApiClient } from "./api.js";
import type { DatasetInfo, LayoutTree, Rect } from "./types.js";
import type { ClassColumn } from "./classTable.js";
import { highlightSet } from "./classTable.js";
import type { DetailModel } from "./detail.js";
import { fetchDetail } from "./detail.js";
import type { Scene } from "./scene.js";
import { computeScene, subtreeLeafCount } from "./scene.js";
import type { ExplorerState } from "./state.js";
import {
  initialState,
  selectImage,
  setClustersVisible,
  setImageSize,
  toggleFocusMisclassified,
  toggleOutlineMisclassified,
  zoomInto,
  zoomOut,
} from "./state.js";

export interface ZoomTransition {
  kind: "in" | "out";
  /** Geometry of the cluster being entered/left, in pre-zoom coordinates. */
  focusRect: Rect;
}

export interface ControllerCallbacks {
  onScene(scene: Scene, layout: LayoutTree): void;
  onTransition?(transition: ZoomTransition): void;
  onDetail?(detail: DetailModel | null): void;
  onError?(error: unknown): void;
}

export interface ControllerOptions {
  viewportW: number;
  viewportH: number;
}

export class ExplorerController {
  state!: ExplorerState;
  dataset!: DatasetInfo;

  private layoutTree: LayoutTree | null = null;
  private highlight: ReadonlySet<number> | null = null;
  private requestSeq = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly callbacks: ControllerCallbacks,
    private readonly options: ControllerOptions,
  ) {}

  get layout(): LayoutTree | null {
    return this.layoutTree;
  }

  /** Images under the current zoom root; upper bound for the k slider. */
  get currentLeafCount(): number {
    return this.layoutTree ? subtreeLeafCount(this.layoutTree) : this.dataset.item_count;
  }

  async start(): Promise<void> {
    this.dataset = await this.api.dataset();
    this.state = initialState(this.dataset.root_id);
    await this.refreshLayout();
  }

  private async refreshLayout(): Promise<void> {
    const seq = ++this.requestSeq;
    const view = this.state.view;
    try {
      const layout = await this.api.layout({
        node: view.currentNode,
        k: view.clustersVisible,
        w: this.options.viewportW,
        h: this.options.viewportH,
        img: view.imageSize,
      });
      if (seq !== this.requestSeq) return; // superseded by a newer request
      this.layoutTree = layout;
      this.emitScene();
    } catch (error) {
      if (seq !== this.requestSeq) return;
      this.callbacks.onError?.(error);
    }
  }

  private emitScene(): void {
    if (!this.layoutTree) return;
    this.callbacks.onScene(computeScene(this.layoutTree, this.state.view, this.highlight), this.layoutTree);
  }

  private findRect(nodeId: number): Rect | null {
    if (!this.layoutTree) return null;
    const stack = [this.layoutTree.root];
    while (stack.length) {
      const node = stack.pop()!;
      if (node.node_id === nodeId) return node.rect;
      stack.push(...(node.children ?? []));
    }
    return null;
  }

  /** Click on a cluster rect: zoom in. Click on the outermost rect: zoom out. */
  async handleClusterClick(nodeId: number): Promise<void> {
    if (nodeId === this.state.view.currentNode) {
      await this.zoomOutOneLevel();
      return;
    }
    const focusRect = this.findRect(nodeId);
    const next = zoomInto(this.state, nodeId);
    if (next === this.state) return;
    this.state = next;
    if (focusRect) this.callbacks.onTransition?.({ kind: "in", focusRect });
    this.callbacks.onDetail?.(null);
    await this.refreshLayout();
  }

  async zoomOutOneLevel(): Promise<void> {
    const next = zoomOut(this.state);
    if (next === this.state) return; // already at the top of the history
    const leaving = this.state.view.currentNode;
    this.state = next;
    this.callbacks.onDetail?.(null);
    await this.refreshLayout();
    const focusRect = this.findRect(leaving);
    if (focusRect) this.callbacks.onTransition?.({ kind: "out", focusRect });
  }

  async setClustersVisible(k: number): Promise<void> {
    const clamped = setClustersVisible(this.state, k, this.currentLeafCount);
    if (clamped.view.clustersVisible === this.state.view.clustersVisible) {
      this.state = clamped;
      return;
    }
    this.state = clamped;
    await this.refreshLayout();
  }

  async setImageSize(px: number): Promise<void> {
    const next = setImageSize(this.state, px);
    if (next.view.imageSize === this.state.view.imageSize) {
      this.state = next;
      return;
    }
    this.state = next;
    await this.refreshLayout();
  }

  /** Visual-only: re-style the cached layout, no fetch. */
  toggleOutlineMisclassified(): void {
    this.state = toggleOutlineMisclassified(this.state);
    this.emitScene();
  }

  /** Visual-only: re-style the cached layout, no fetch. */
  toggleFocusMisclassified(): void {
    this.state = toggleFocusMisclassified(this.state);
    this.emitScene();
  }

  /** Class-table hover: dim everything not belonging to the entry. */
  hoverClassEntry(classId: number | null, column: ClassColumn = "class_name"): void {
    this.highlight = classId === null ? null : highlightSet(this.dataset, classId, column);
    this.emitScene();
  }

  async selectImage(imageId: number | null): Promise<void> {
    this.state = selectImage(this.state, imageId);
    if (imageId === null) {
      this.callbacks.onDetail?.(null);
      return;
    }
    try {
      const detail = await fetchDetail(this.api, this.dataset, imageId);
      if (this.state.view.selectedImage === imageId) {
        this.callbacks.onDetail?.(detail);
      }
    } catch (error) {
      this.callbacks.onError?.(error);
    }
  }

  async fetchClassTable() {
    return this.api.classTable(this.state.view.currentNode);
  }
}
