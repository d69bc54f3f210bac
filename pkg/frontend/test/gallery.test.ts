import { describe, expect, it } from "vitest";

import type { ImageEntry } from "../src/api";
import { annotatedCount, nextUnannotated, step } from "../src/gallery";

function entry(id: string, annotated = false): ImageEntry {
  return { id, width: 640, height: 480, annotated, annotation: null };
}

describe("gallery navigation", () => {
  const entries = [entry("a"), entry("b", true), entry("c")];

  it("steps forward and backward with clamping", () => {
    expect(step(entries, "a", 1)).toBe("b");
    expect(step(entries, "c", 1)).toBe("c");
    expect(step(entries, "a", -1)).toBe("a");
    expect(step(entries, null, 1)).toBe("a");
    expect(step([], null, 1)).toBeNull();
  });

  it("advances to the next unannotated image, wrapping", () => {
    expect(nextUnannotated(entries, "a")).toBe("c");
    expect(nextUnannotated(entries, "c")).toBe("a");
  });

  it("returns null when everything is annotated", () => {
    const done = [entry("a", true), entry("b", true)];
    expect(nextUnannotated(done, "a")).toBeNull();
  });

  it("counts badges", () => {
    expect(annotatedCount(entries)).toBe(1);
  });
});
