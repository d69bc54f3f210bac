import { describe, expect, it } from "vitest";

import {
  initialState,
  isSavable,
  pointerDown,
  pointerMove,
  pointerUp,
  undo,
} from "../src/annotator";
import { initialViewport, screenToImage, zoomAt } from "../src/viewport";

const W = 640;
const H = 480;

function clickAndDrag(viewport: ReturnType<typeof initialViewport>, from: [number, number], to: [number, number]) {
  // screen-space gesture converted through the viewport, as main.ts does
  let state = initialState("img.pgm");
  state = pointerDown(state, screenToImage(viewport, from[0], from[1]), W, H);
  state = pointerMove(state, screenToImage(viewport, to[0], to[1]));
  state = pointerUp(state, screenToImage(viewport, to[0], to[1]));
  return state;
}

describe("gesture to draft", () => {
  it("click sets the center, drag sets the radius", () => {
    const state = clickAndDrag(initialViewport(), [320, 240], [360, 240]);
    expect(state.draft.cx).toBe(320);
    expect(state.draft.cy).toBe(240);
    expect(state.draft.r).toBeCloseTo(40, 9);
    expect(state.draft.dirty).toBe(true);
    expect(isSavable(state.draft)).toBe(true);
  });

  it("the same gesture at 4x zoom yields the identical image-space draft", () => {
    const plain = clickAndDrag(initialViewport(), [320, 240], [360, 240]);

    let v = initialViewport();
    v = zoomAt(v, 4, 320, 240); // zoom around the center point
    // at 4x the same image points sit at different screen positions
    const centerScreen: [number, number] = [320, 240];
    const rimScreen: [number, number] = [320 + 40 * 4, 240];
    const zoomed = clickAndDrag(v, centerScreen, rimScreen);

    expect(zoomed.draft.cx).toBeCloseTo(plain.draft.cx!, 6);
    expect(zoomed.draft.cy).toBeCloseTo(plain.draft.cy!, 6);
    expect(zoomed.draft.r).toBeCloseTo(plain.draft.r!, 6);
  });

  it("clicks outside the image bounds are ignored", () => {
    let state = initialState("img.pgm");
    state = pointerDown(state, { x: -5, y: 10 }, W, H);
    expect(state.draft.cx).toBeNull();
    state = pointerDown(state, { x: 10, y: H + 1 }, W, H);
    expect(state.draft.cx).toBeNull();
  });

  it("a plain click keeps any previously dragged radius", () => {
    let state = clickAndDrag(initialViewport(), [320, 240], [360, 240]);
    state = pointerDown(state, { x: 100, y: 100 }, W, H);
    state = pointerUp(state, { x: 100, y: 100 });
    expect(state.draft.cx).toBe(100);
    expect(state.draft.r).toBeCloseTo(40, 9);
  });
});

describe("undo", () => {
  it("after a drag reverts the radius and keeps the center", () => {
    let state = clickAndDrag(initialViewport(), [320, 240], [360, 240]);
    state = undo(state);
    expect(state.draft.cx).toBe(320);
    expect(state.draft.cy).toBe(240);
    expect(state.draft.r).toBeNull();
  });

  it("a second undo removes the center", () => {
    let state = clickAndDrag(initialViewport(), [320, 240], [360, 240]);
    state = undo(undo(state));
    expect(state.draft.cx).toBeNull();
  });

  it("on an empty state is a no-op", () => {
    const state = initialState("img.pgm");
    expect(undo(state)).toBe(state);
  });
});

describe("savability", () => {
  it("requires a center and a positive radius", () => {
    let state = initialState("img.pgm");
    expect(isSavable(state.draft)).toBe(false);
    state = pointerDown(state, { x: 10, y: 10 }, W, H);
    state = pointerUp(state, { x: 10, y: 10 });
    expect(isSavable(state.draft)).toBe(false); // no radius dragged yet
  });
});
