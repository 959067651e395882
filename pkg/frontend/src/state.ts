/**
 * Explorer view state and its pure transitions.
 *
 * The rendered scene is a pure function of (service responses, ViewState),
 * so every interaction is modeled as a transition here and the DOM layer
 * only dispatches. Zoom history is a node-id stack: zooming in pushes the
 * previous root, clicking the outermost rect pops one level.
 */

export const K_DEFAULT = 8;
export const K_MIN = 1;
export const IMAGE_SIZE_MIN = 12;
export const IMAGE_SIZE_MAX = 120;
export const IMAGE_SIZE_DEFAULT = 40;

export interface ViewState {
  currentNode: number;
  clustersVisible: number;
  imageSize: number;
  outlineMisclassified: boolean;
  focusMisclassified: boolean;
  selectedImage: number | null;
}

export interface ExplorerState {
  view: ViewState;
  zoomStack: number[];
}

export function initialState(rootId: number): ExplorerState {
  return {
    view: {
      currentNode: rootId,
      clustersVisible: K_DEFAULT,
      imageSize: IMAGE_SIZE_DEFAULT,
      outlineMisclassified: false,
      focusMisclassified: false,
      selectedImage: null,
    },
    zoomStack: [],
  };
}

export function clampClusters(k: number, subtreeLeafCount: number): number {
  const upper = Math.max(K_MIN, subtreeLeafCount);
  return Math.min(Math.max(Math.round(k), K_MIN), upper);
}

export function clampImageSize(px: number): number {
  return Math.min(Math.max(Math.round(px), IMAGE_SIZE_MIN), IMAGE_SIZE_MAX);
}

export function zoomInto(state: ExplorerState, nodeId: number): ExplorerState {
  if (nodeId === state.view.currentNode) return state;
  return {
    view: { ...state.view, currentNode: nodeId, selectedImage: null },
    zoomStack: [...state.zoomStack, state.view.currentNode],
  };
}

export function zoomOut(state: ExplorerState): ExplorerState {
  const parent = state.zoomStack[state.zoomStack.length - 1];
  if (parent === undefined) return state;
  return {
    view: { ...state.view, currentNode: parent, selectedImage: null },
    zoomStack: state.zoomStack.slice(0, -1),
  };
}

export function setClustersVisible(state: ExplorerState, k: number, subtreeLeafCount: number): ExplorerState {
  return { ...state, view: { ...state.view, clustersVisible: clampClusters(k, subtreeLeafCount) } };
}

export function setImageSize(state: ExplorerState, px: number): ExplorerState {
  return { ...state, view: { ...state.view, imageSize: clampImageSize(px) } };
}

export function toggleOutlineMisclassified(state: ExplorerState): ExplorerState {
  return { ...state, view: { ...state.view, outlineMisclassified: !state.view.outlineMisclassified } };
}

export function toggleFocusMisclassified(state: ExplorerState): ExplorerState {
  return { ...state, view: { ...state.view, focusMisclassified: !state.view.focusMisclassified } };
}

export function selectImage(state: ExplorerState, imageId: number | null): ExplorerState {
  return { ...state, view: { ...state.view, selectedImage: imageId } };
}
