/**
 * Annotation gesture state: first click places the center crosshair,
 * dragging from the center sets the radius, undo reverts the last
 * gesture. Everything here works in image coordinates; callers convert
 * screen events through the viewport first.
 */

import type { Point } from "./viewport";

export interface AnnotationDraft {
  imageId: string;
  cx: number | null;
  cy: number | null;
  r: number | null;
  dirty: boolean;
}

type Gesture = "set-center" | "set-radius";

export interface AnnotatorState {
  draft: AnnotationDraft;
  dragging: boolean;
  history: Gesture[];
}

export function emptyDraft(imageId: string): AnnotationDraft {
  return { imageId, cx: null, cy: null, r: null, dirty: false };
}

export function fromSaved(imageId: string, cx: number, cy: number, r: number): AnnotatorState {
  return {
    draft: { imageId, cx, cy, r, dirty: false },
    dragging: false,
    history: [],
  };
}

export function initialState(imageId: string): AnnotatorState {
  return { draft: emptyDraft(imageId), dragging: false, history: [] };
}

function inBounds(p: Point, width: number, height: number): boolean {
  return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height;
}

/** Pointer pressed at an image point: place the center (or start a new one). */
export function pointerDown(
  state: AnnotatorState,
  p: Point,
  width: number,
  height: number,
): AnnotatorState {
  if (!inBounds(p, width, height)) return state; // clicks outside are ignored
  return {
    draft: { ...state.draft, cx: p.x, cy: p.y, r: state.draft.r, dirty: true },
    dragging: true,
    history: [...state.history, "set-center"],
  };
}

/** Pointer dragged: the distance from the center previews the radius. */
export function pointerMove(state: AnnotatorState, p: Point): AnnotatorState {
  if (!state.dragging || state.draft.cx === null || state.draft.cy === null) return state;
  const r = Math.hypot(p.x - state.draft.cx, p.y - state.draft.cy);
  return { ...state, draft: { ...state.draft, r: r > 0 ? r : state.draft.r } };
}

/** Pointer released: commit the radius gesture when one was dragged. */
export function pointerUp(state: AnnotatorState, p: Point): AnnotatorState {
  if (!state.dragging) return state;
  const moved = pointerMove(state, p);
  const draggedRadius =
    moved.draft.cx !== null && Math.hypot(p.x - moved.draft.cx!, p.y - moved.draft.cy!) > 0.5;
  return {
    ...moved,
    dragging: false,
    history: draggedRadius ? [...moved.history, "set-radius"] : moved.history,
  };
}

/** Undo the last gesture: a radius drag first, then the center. */
export function undo(state: AnnotatorState): AnnotatorState {
  const history = [...state.history];
  const last = history.pop();
  if (last === undefined) return state;
  if (last === "set-radius") {
    return { ...state, draft: { ...state.draft, r: null }, history };
  }
  return {
    ...state,
    draft: { ...state.draft, cx: null, cy: null, dirty: state.draft.r !== null },
    history,
  };
}

export function isSavable(draft: AnnotationDraft): boolean {
  return draft.cx !== null && draft.cy !== null && draft.r !== null && draft.r > 0;
}
