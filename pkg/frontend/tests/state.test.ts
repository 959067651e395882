import { describe, expect, it } from "vitest";

import {
  IMAGE_SIZE_MAX,
  IMAGE_SIZE_MIN,
  K_DEFAULT,
  clampClusters,
  clampImageSize,
  initialState,
  selectImage,
  setClustersVisible,
  toggleFocusMisclassified,
  toggleOutlineMisclassified,
  zoomInto,
  zoomOut,
} from "../src/state.js";

describe("initialState", () => {
  it("starts at the root with eight clusters", () => {
    const state = initialState(46);
    expect(state.view.currentNode).toBe(46);
    expect(state.view.clustersVisible).toBe(K_DEFAULT);
    expect(state.zoomStack).toEqual([]);
  });
});

describe("zoom transitions", () => {
  it("zoom in then out restores the previous view state", () => {
    const before = initialState(46);
    const zoomed = zoomInto(before, 44);
    expect(zoomed.view.currentNode).toBe(44);
    expect(zoomed.zoomStack).toEqual([46]);
    const restored = zoomOut(zoomed);
    expect(restored.view).toEqual(before.view);
    expect(restored.zoomStack).toEqual([]);
  });

  it("stacks nested zooms and unwinds them in order", () => {
    let state = initialState(46);
    state = zoomInto(state, 44);
    state = zoomInto(state, 40);
    expect(state.zoomStack).toEqual([46, 44]);
    state = zoomOut(state);
    expect(state.view.currentNode).toBe(44);
    state = zoomOut(state);
    expect(state.view.currentNode).toBe(46);
  });

  it("zooming out at the top level is a no-op", () => {
    const state = initialState(46);
    expect(zoomOut(state)).toBe(state);
  });

  it("zooming into the current node is a no-op", () => {
    const state = initialState(46);
    expect(zoomInto(state, 46)).toBe(state);
  });

  it("zooming clears the selected image", () => {
    const state = selectImage(initialState(46), 7);
    expect(zoomInto(state, 44).view.selectedImage).toBeNull();
  });
});

describe("slider clamping", () => {
  it("never drops below one cluster", () => {
    expect(clampClusters(0, 24)).toBe(1);
    expect(clampClusters(-5, 24)).toBe(1);
  });

  it("never exceeds the subtree leaf count", () => {
    expect(clampClusters(99, 24)).toBe(24);
    expect(clampClusters(8, 3)).toBe(3);
  });

  it("applies on state updates", () => {
    const state = setClustersVisible(initialState(46), 100, 10);
    expect(state.view.clustersVisible).toBe(10);
  });

  it("bounds the image size slider", () => {
    expect(clampImageSize(1)).toBe(IMAGE_SIZE_MIN);
    expect(clampImageSize(9999)).toBe(IMAGE_SIZE_MAX);
    expect(clampImageSize(40)).toBe(40);
  });
});

describe("toggles", () => {
  it("flip independently", () => {
    let state = initialState(46);
    state = toggleOutlineMisclassified(state);
    expect(state.view.outlineMisclassified).toBe(true);
    expect(state.view.focusMisclassified).toBe(false);
    state = toggleFocusMisclassified(state);
    expect(state.view.focusMisclassified).toBe(true);
    state = toggleOutlineMisclassified(state);
    expect(state.view.outlineMisclassified).toBe(false);
  });
});
