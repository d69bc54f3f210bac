import { describe, expect, it } from "vitest";

import {
  MAX_ZOOM,
  clampPan,
  fitZoom,
  imageToScreen,
  initialViewport,
  screenToImage,
  zoomAt,
} from "../src/viewport";

describe("screen/image transforms", () => {
  it("round-trips at any zoom and pan", () => {
    const v = { zoom: 3.7, panX: 41.2, panY: 17.9 };
    const p = screenToImage(v, 123.4, 56.7);
    const s = imageToScreen(v, p.x, p.y);
    expect(s.x).toBeCloseTo(123.4, 9);
    expect(s.y).toBeCloseTo(56.7, 9);
  });

  it("is the identity at zoom 1 with no pan", () => {
    const v = initialViewport();
    expect(screenToImage(v, 320, 240)).toEqual({ x: 320, y: 240 });
  });
});

describe("zoom gesture correctness", () => {
  // acceptance: the same physical gesture target yields image-space
  // coordinates within 1 px whether performed at 1x or 8x
  it("gestures at 1x and 8x agree within 1 px", () => {
    const target = { x: 320.25, y: 239.75 };

    const v1 = initialViewport();
    const s1 = imageToScreen(v1, target.x, target.y);
    const p1 = screenToImage(v1, s1.x, s1.y);

    let v8 = initialViewport();
    // zoom to 8x around the target point (three wheel steps of 2x)
    const anchor = imageToScreen(v1, target.x, target.y);
    v8 = zoomAt(v8, 2, anchor.x, anchor.y);
    v8 = zoomAt(v8, 2, anchor.x, anchor.y);
    v8 = zoomAt(v8, 2, anchor.x, anchor.y);
    expect(v8.zoom).toBe(8);
    const s8 = imageToScreen(v8, target.x, target.y);
    const p8 = screenToImage(v8, s8.x, s8.y);

    expect(Math.hypot(p8.x - p1.x, p8.y - p1.y)).toBeLessThanOrEqual(1);
    // screen-pixel quantization at 8x maps to 1/8 image pixel
    const quantized = screenToImage(v8, Math.round(s8.x), Math.round(s8.y));
    expect(Math.hypot(quantized.x - target.x, quantized.y - target.y)).toBeLessThanOrEqual(1);
  });

  it("keeps the cursor anchor fixed while zooming", () => {
    let v = initialViewport();
    const before = screenToImage(v, 200, 150);
    v = zoomAt(v, 2.5, 200, 150);
    const after = screenToImage(v, 200, 150);
    expect(after.x).toBeCloseTo(before.x, 9);
    expect(after.y).toBeCloseTo(before.y, 9);
  });

  it("clamps magnification to the 1..8 range", () => {
    let v = initialViewport();
    for (let i = 0; i < 10; i++) v = zoomAt(v, 2, 0, 0);
    expect(v.zoom).toBe(MAX_ZOOM);
    for (let i = 0; i < 20; i++) v = zoomAt(v, 0.5, 0, 0);
    expect(v.zoom).toBe(1);
  });
});

describe("pan clamping", () => {
  it("keeps the window inside the image", () => {
    const v = clampPan({ zoom: 4, panX: 1e6, panY: -50 }, 640, 480, 800, 600);
    expect(v.panX).toBe(640 - 800 / 4);
    expect(v.panY).toBe(0);
  });

  it("centers when the image is smaller than the canvas", () => {
    const v = clampPan({ zoom: 1, panX: 0, panY: 0 }, 100, 100, 800, 600);
    expect(v.panX).toBe((100 - 800) / 2);
    expect(v.panY).toBe((100 - 600) / 2);
  });

  it("fitZoom never exceeds the zoom bounds", () => {
    expect(fitZoom(6400, 4800, 800, 600)).toBe(1);
    expect(fitZoom(10, 10, 800, 600)).toBe(8);
  });
});
