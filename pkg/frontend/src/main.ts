/**
 * Annotator page wiring: gallery sidebar, canvas viewport with zoom and
 * pan, gesture handling, keyboard shortcuts, and saving to the server.
 *
 * Keyboard: left/right step through images, Enter saves, u undoes the
 * last gesture, +/- zoom, 0 resets the view.
 */

import {
  ApiError,
  ImageEntry,
  ValidationError,
  getAnnotation,
  imageUrl,
  listImages,
  putAnnotation,
} from "./api";
import {
  AnnotatorState,
  fromSaved,
  initialState,
  isSavable,
  pointerDown,
  pointerMove,
  pointerUp,
  undo,
} from "./annotator";
import { annotatedCount, nextUnannotated, step } from "./gallery";
import {
  Viewport,
  clampPan,
  imageToScreen,
  initialViewport,
  screenToImage,
  zoomAt,
} from "./viewport";

const $ = (id: string) => document.getElementById(id) as HTMLElement;

interface App {
  entries: ImageEntry[];
  currentId: string | null;
  image: HTMLImageElement | null;
  state: AnnotatorState | null;
  viewport: Viewport;
  panning: boolean;
  lastPointer: { x: number; y: number } | null;
}

const app: App = {
  entries: [],
  currentId: null,
  image: null,
  state: null,
  viewport: initialViewport(),
  panning: false,
  lastPointer: null,
};

const canvas = document.getElementById("canvas") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;

// ---------------------------------------------------------------------------
// rendering

function render(): void {
  ctx.fillStyle = "#181a1f";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (!app.image) return;
  const v = app.viewport;
  ctx.imageSmoothingEnabled = v.zoom < 3;
  ctx.drawImage(
    app.image,
    v.panX,
    v.panY,
    canvas.width / v.zoom,
    canvas.height / v.zoom,
    0,
    0,
    canvas.width,
    canvas.height,
  );

  const draft = app.state?.draft;
  if (draft && draft.cx !== null && draft.cy !== null) {
    const c = imageToScreen(v, draft.cx, draft.cy);
    ctx.strokeStyle = "#ffb447";
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(c.x - 10, c.y);
    ctx.lineTo(c.x + 10, c.y);
    ctx.moveTo(c.x, c.y - 10);
    ctx.lineTo(c.x, c.y + 10);
    ctx.stroke();
    if (draft.r !== null && draft.r > 0) {
      ctx.beginPath();
      ctx.arc(c.x, c.y, draft.r * v.zoom, 0, 2 * Math.PI);
      ctx.stroke();
    }
  }
  updateHud();
}

function updateHud(): void {
  const draft = app.state?.draft;
  const parts = [`zoom ${app.viewport.zoom.toFixed(1)}x`];
  if (draft?.cx !== null && draft?.cx !== undefined) {
    parts.push(`center (${draft.cx!.toFixed(1)}, ${draft.cy!.toFixed(1)})`);
  }
  if (draft?.r) parts.push(`r ${draft.r.toFixed(1)} px`);
  if (draft?.dirty) parts.push("unsaved");
  $("hud").textContent = parts.join("  ·  ");
  const saveButton = $("save") as HTMLButtonElement;
  saveButton.disabled = !(draft && isSavable(draft));
}

function renderGallery(): void {
  const list = $("gallery");
  list.innerHTML = "";
  if (app.entries.length === 0) {
    list.innerHTML = '<p class="empty">No images found in the served directory.</p>';
    return;
  }
  for (const entry of app.entries) {
    const item = document.createElement("button");
    item.className = "entry" + (entry.id === app.currentId ? " active" : "");
    item.textContent = entry.id;
    if (entry.annotated) {
      const badge = document.createElement("span");
      badge.className = "badge";
      badge.textContent = "✓";
      item.appendChild(badge);
    }
    item.addEventListener("click", () => void openImage(entry.id));
    list.appendChild(item);
  }
  $("progress").textContent = `${annotatedCount(app.entries)} / ${app.entries.length} annotated`;
}

function banner(message: string | null, retry = false): void {
  const el = $("banner");
  if (!message) {
    el.hidden = true;
    return;
  }
  el.hidden = false;
  el.innerHTML = "";
  el.append(message);
  if (retry) {
    const button = document.createElement("button");
    button.textContent = "Retry";
    button.addEventListener("click", () => void refresh());
    el.append(" ", button);
  }
}

// ---------------------------------------------------------------------------
// data flow

async function refresh(): Promise<void> {
  try {
    app.entries = await listImages();
    banner(null);
  } catch {
    banner("Cannot reach the annotation server.", true);
    return;
  }
  renderGallery();
  if (app.currentId === null && app.entries.length > 0) {
    await openImage(app.entries[0].id);
  }
}

async function openImage(id: string): Promise<void> {
  app.currentId = id;
  const image = new Image();
  image.src = imageUrl(id);
  try {
    await image.decode();
  } catch {
    banner(`Cannot load image ${id}.`, true);
    return;
  }
  app.image = image;
  app.viewport = initialViewport();
  fitCanvas();

  let saved = null;
  try {
    saved = await getAnnotation(id);
  } catch {
    // listing already told the user about connectivity; keep editing
  }
  app.state = saved ? fromSaved(id, saved.cx, saved.cy, saved.r) : initialState(id);
  renderGallery();
  render();
}

async function save(): Promise<void> {
  if (!app.state || !app.currentId) return;
  const draft = app.state.draft;
  if (!isSavable(draft)) return;
  try {
    await putAnnotation(app.currentId, draft.cx!, draft.cy!, draft.r!);
  } catch (err) {
    if (err instanceof ValidationError) {
      banner(`Rejected: ${err.message}`);
    } else if (err instanceof ApiError || err instanceof TypeError) {
      banner("Save failed: server unreachable. Your draft is kept.", true);
    }
    return; // draft stays, dirty flag stays
  }
  banner(null);
  app.state = { ...app.state, draft: { ...draft, dirty: false } };
  app.entries = await listImages().catch(() => app.entries);
  renderGallery();
  const next = nextUnannotated(app.entries, app.currentId);
  if (next !== null) {
    await openImage(next);
  } else {
    render();
  }
}

// ---------------------------------------------------------------------------
// input handling

function canvasPoint(ev: PointerEvent | WheelEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
}

canvas.addEventListener("pointerdown", (ev) => {
  if (!app.image || !app.state) return;
  const s = canvasPoint(ev);
  if (ev.button === 1 || ev.shiftKey) {
    app.panning = true;
    app.lastPointer = s;
    ev.preventDefault();
    return;
  }
  const p = screenToImage(app.viewport, s.x, s.y);
  app.state = pointerDown(app.state, p, app.image.naturalWidth, app.image.naturalHeight);
  canvas.setPointerCapture(ev.pointerId);
  render();
});

canvas.addEventListener("pointermove", (ev) => {
  if (!app.image || !app.state) return;
  const s = canvasPoint(ev);
  if (app.panning && app.lastPointer) {
    const moved = panBy(s.x - app.lastPointer.x, s.y - app.lastPointer.y);
    app.lastPointer = s;
    if (moved) render();
    return;
  }
  const p = screenToImage(app.viewport, s.x, s.y);
  const next = pointerMove(app.state, p);
  if (next !== app.state) {
    app.state = next;
    render();
  }
});

canvas.addEventListener("pointerup", (ev) => {
  if (app.panning) {
    app.panning = false;
    app.lastPointer = null;
    return;
  }
  if (!app.state) return;
  const s = canvasPoint(ev);
  app.state = pointerUp(app.state, screenToImage(app.viewport, s.x, s.y));
  render();
});

canvas.addEventListener("wheel", (ev) => {
  if (!app.image) return;
  ev.preventDefault();
  const s = canvasPoint(ev);
  const factor = ev.deltaY < 0 ? 1.25 : 0.8;
  app.viewport = clampPan(
    zoomAt(app.viewport, factor, s.x, s.y),
    app.image.naturalWidth,
    app.image.naturalHeight,
    canvas.width,
    canvas.height,
  );
  render();
});

function panBy(dx: number, dy: number): boolean {
  if (!app.image) return false;
  const before = app.viewport;
  app.viewport = clampPan(
    { ...before, panX: before.panX - dx / before.zoom, panY: before.panY - dy / before.zoom },
    app.image.naturalWidth,
    app.image.naturalHeight,
    canvas.width,
    canvas.height,
  );
  return app.viewport.panX !== before.panX || app.viewport.panY !== before.panY;
}

document.addEventListener("keydown", (ev) => {
  if (ev.target instanceof HTMLInputElement || ev.target instanceof HTMLTextAreaElement) return;
  switch (ev.key) {
    case "ArrowLeft":
      ev.preventDefault();
      void stepTo(-1);
      break;
    case "ArrowRight":
      ev.preventDefault();
      void stepTo(1);
      break;
    case "Enter":
      ev.preventDefault();
      void save();
      break;
    case "u":
    case "z":
      if (app.state) {
        app.state = undo(app.state);
        render();
      }
      break;
    case "+":
    case "=":
      zoomCenter(1.25);
      break;
    case "-":
      zoomCenter(0.8);
      break;
    case "0":
      app.viewport = initialViewport();
      render();
      break;
  }
});

async function stepTo(delta: number): Promise<void> {
  const id = step(app.entries, app.currentId, delta);
  if (id !== null && id !== app.currentId) await openImage(id);
}

function zoomCenter(factor: number): void {
  if (!app.image) return;
  app.viewport = clampPan(
    zoomAt(app.viewport, factor, canvas.width / 2, canvas.height / 2),
    app.image.naturalWidth,
    app.image.naturalHeight,
    canvas.width,
    canvas.height,
  );
  render();
}

$("save").addEventListener("click", () => void save());
$("undo").addEventListener("click", () => {
  if (app.state) {
    app.state = undo(app.state);
    render();
  }
});

function fitCanvas(): void {
  const holder = $("stage");
  canvas.width = holder.clientWidth;
  canvas.height = holder.clientHeight;
}

window.addEventListener("resize", () => {
  fitCanvas();
  render();
});

fitCanvas();
void refresh();
