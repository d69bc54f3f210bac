/** Gallery ordering and navigation over the image listing. */

import type { ImageEntry } from "./api";

export function annotatedCount(entries: ImageEntry[]): number {
  return entries.filter((e) => e.annotated).length;
}

export function indexOf(entries: ImageEntry[], id: string | null): number {
  if (id === null) return -1;
  return entries.findIndex((e) => e.id === id);
}

export function step(entries: ImageEntry[], currentId: string | null, delta: number): string | null {
  if (entries.length === 0) return null;
  const i = indexOf(entries, currentId);
  if (i < 0) return entries[0].id;
  const next = Math.min(Math.max(i + delta, 0), entries.length - 1);
  return entries[next].id;
}

/**
 * The image to open after a save: the next unannotated one following the
 * current position (wrapping), or null when everything is annotated.
 */
export function nextUnannotated(entries: ImageEntry[], currentId: string | null): string | null {
  if (entries.length === 0) return null;
  const start = Math.max(indexOf(entries, currentId), 0);
  for (let k = 1; k <= entries.length; k++) {
    const entry = entries[(start + k) % entries.length];
    if (!entry.annotated) return entry.id;
  }
  return null;
}
