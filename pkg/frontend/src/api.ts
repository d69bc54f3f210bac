/** Typed client for the annotation server's JSON API. */

export interface SavedAnnotation {
  cx: number;
  cy: number;
  r: number;
  annotator: string;
  timestamp: number;
}

export interface ImageEntry {
  id: string;
  width: number | null;
  height: number | null;
  annotated: boolean;
  annotation: SavedAnnotation | null;
}

/** Server rejected the annotation (HTTP 422); the draft must be kept. */
export class ValidationError extends Error {}

/** Server unreachable or answered with an unexpected status. */
export class ApiError extends Error {}

export function imageUrl(id: string): string {
  return `/api/image/${encodeURIComponent(id)}`;
}

export async function listImages(): Promise<ImageEntry[]> {
  const resp = await fetch("/api/images");
  if (!resp.ok) throw new ApiError(`image listing failed: ${resp.status}`);
  return (await resp.json()) as ImageEntry[];
}

export async function getAnnotation(id: string): Promise<SavedAnnotation | null> {
  const resp = await fetch(`/api/annotation/${encodeURIComponent(id)}`);
  if (resp.status === 404) return null;
  if (!resp.ok) throw new ApiError(`annotation fetch failed: ${resp.status}`);
  return (await resp.json()) as SavedAnnotation;
}

export async function putAnnotation(
  id: string,
  cx: number,
  cy: number,
  r: number,
  annotator = "annotator-ui",
): Promise<SavedAnnotation> {
  const resp = await fetch(`/api/annotation/${encodeURIComponent(id)}`, {
    method: "PUT",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ cx, cy, r, annotator, timestamp: Math.floor(Date.now() / 1000) }),
  });
  if (resp.status === 422) {
    const body = (await resp.json().catch(() => ({ error: "invalid annotation" }))) as {
      error?: string;
    };
    throw new ValidationError(body.error ?? "invalid annotation");
  }
  if (!resp.ok) throw new ApiError(`annotation save failed: ${resp.status}`);
  return (await resp.json()) as SavedAnnotation;
}
