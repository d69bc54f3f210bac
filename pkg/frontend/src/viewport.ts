/**
 * Viewport math: conversion between screen (canvas) pixels and image
 * pixels under zoom and pan. All annotation coordinates are stored in
 * image space, so these transforms are the only place zoom ever appears.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Viewport {
  /** magnification: screen pixels per image pixel */
  zoom: number;
  /** image coordinates of the screen origin (top-left corner) */
  panX: number;
  panY: number;
}

export const MIN_ZOOM = 1;
export const MAX_ZOOM = 8;

export function initialViewport(): Viewport {
  return { zoom: 1, panX: 0, panY: 0 };
}

export function screenToImage(v: Viewport, sx: number, sy: number): Point {
  return { x: sx / v.zoom + v.panX, y: sy / v.zoom + v.panY };
}

export function imageToScreen(v: Viewport, ix: number, iy: number): Point {
  return { x: (ix - v.panX) * v.zoom, y: (iy - v.panY) * v.zoom };
}

/**
 * Change magnification while keeping the image point under the cursor
 * fixed on screen ("zoom around the cursor").
 */
export function zoomAt(v: Viewport, factor: number, sx: number, sy: number): Viewport {
  const zoom = clamp(v.zoom * factor, MIN_ZOOM, MAX_ZOOM);
  if (zoom === v.zoom) return v;
  const anchor = screenToImage(v, sx, sy);
  return { zoom, panX: anchor.x - sx / zoom, panY: anchor.y - sy / zoom };
}

export function panBy(v: Viewport, dxScreen: number, dyScreen: number): Viewport {
  return { ...v, panX: v.panX - dxScreen / v.zoom, panY: v.panY - dyScreen / v.zoom };
}

/**
 * Keep the visible window inside the image (with slack when the image is
 * smaller than the canvas at the current zoom).
 */
export function clampPan(
  v: Viewport,
  imageW: number,
  imageH: number,
  canvasW: number,
  canvasH: number,
): Viewport {
  const viewW = canvasW / v.zoom;
  const viewH = canvasH / v.zoom;
  const panX = viewW >= imageW ? (imageW - viewW) / 2 : clamp(v.panX, 0, imageW - viewW);
  const panY = viewH >= imageH ? (imageH - viewH) / 2 : clamp(v.panY, 0, imageH - viewH);
  return { ...v, panX, panY };
}

export function fitZoom(imageW: number, imageH: number, canvasW: number, canvasH: number): number {
  return clamp(Math.min(canvasW / imageW, canvasH / imageH), MIN_ZOOM, MAX_ZOOM);
}

function clamp(value: number, lo: number, hi: number): number {
  return Math.min(Math.max(value, lo), hi);
}
