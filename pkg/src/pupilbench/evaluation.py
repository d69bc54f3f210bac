"""Accuracy metric, robustness categories, benchmark driver, and reports.

A detection is a hit when the Euclidean distance between detected and
annotated centers is at most 25% of the annotated pupil radius. Hit
rates are reported to two decimals. Global rates pool hit counts over
all images; average robustness is the unweighted mean of the four
per-category rates (the two conventions intentionally differ).
"""

from __future__ import annotations

import dataclasses
import json
import math
import statistics
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import cht, ef, ido, rst
from .errors import DecodeError, DetectError, EmptySet, ManifestError
from .imaging import GrayImage, decode
from .model import METHODS, Annotation, Detection, failed_detection

HIT_THRESHOLD = 0.25

CATEGORIES = ("clear", "hair_eyelashes", "eyelid", "glasses_reflections")

# image counts of the four robustness classes in the reference corpus,
# used as default proportions for synthetic corpora
DEFAULT_PROPORTIONS = (473, 136, 91, 100)

DEFAULT_REPEAT = 3

_DETECTORS: dict[str, tuple[Callable, Callable]] = {
    "CHT": (cht.cht_detect, cht.ChtConfig),
    "EF": (ef.ef_detect, ef.EfConfig),
    "IDO": (ido.ido_detect, ido.IdoConfig),
    "RST": (rst.rst_detect, rst.RstConfig),
}


def detect_with_method(method: str, img: GrayImage, cfg=None) -> Detection:
    """Run one detector, converting detector failures into error Detections."""
    method = method.upper()
    if method not in _DETECTORS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    fn, cfg_type = _DETECTORS[method]
    if cfg is None:
        cfg = cfg_type()
    t0 = time.perf_counter()
    try:
        return fn(img, cfg)
    except DetectError as exc:
        return failed_detection(method, f"{type(exc).__name__}: {exc}", time.perf_counter() - t0)


def default_config(method: str):
    return _DETECTORS[method.upper()][1]()


# ---------------------------------------------------------------------------
# metric


def relative_error(det: Detection, ann: Annotation) -> float:
    """Center distance divided by the annotated radius; +inf for errored
    detections so they always count as misses."""
    if not det.ok:
        return math.inf
    d = math.hypot(det.cx - ann.cx, det.cy - ann.cy)
    return d / ann.r


def is_hit(err: float) -> bool:
    """Hit when the relative error is at most 25% (boundary inclusive)."""
    if err < 0:
        raise ValueError(f"relative error cannot be negative, got {err}")
    return err <= HIT_THRESHOLD


def hit_rate(results: Sequence[tuple[Detection, Annotation]]) -> float:
    """Percentage of hits, reported to two decimals."""
    if not results:
        raise EmptySet("hit rate over an empty result list")
    hits = sum(1 for det, ann in results if is_hit(relative_error(det, ann)))
    return round(100.0 * hits / len(results), 2)


def average_robustness(category_rates: Iterable[float]) -> float:
    """Unweighted mean of per-category hit rates, to two decimals."""
    rates = list(category_rates)
    if not rates:
        raise EmptySet("average robustness over an empty rate list")
    return round(sum(rates) / len(rates), 2)


# ---------------------------------------------------------------------------
# dataset manifest


@dataclass(frozen=True)
class DatasetEntry:
    path: str
    category: str
    annotation: Annotation

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ManifestError(f"unknown category {self.category!r} for {self.path}")


@dataclass(frozen=True)
class DatasetManifest:
    root: Path
    entries: tuple[DatasetEntry, ...]

    def resolve(self, entry: DatasetEntry) -> Path:
        return self.root / entry.path


def manifest_to_dict(manifest: DatasetManifest) -> dict:
    return {
        "version": 1,
        "images": [
            {
                "path": e.path,
                "category": e.category,
                "annotation": e.annotation.to_json_dict(),
            }
            for e in manifest.entries
        ],
    }


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ManifestError(f"manifest not found: {path}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    return parse_manifest(data, root=path.parent)


def parse_manifest(data: dict, root: Path) -> DatasetManifest:
    if not isinstance(data, dict) or data.get("version") != 1:
        raise ManifestError("manifest must be an object with version 1")
    images = data.get("images")
    if not isinstance(images, list):
        raise ManifestError("manifest must carry an 'images' list")
    entries = []
    for item in images:
        try:
            ann_raw = item["annotation"]
            ann = Annotation(
                cx=float(ann_raw["cx"]),
                cy=float(ann_raw["cy"]),
                r=float(ann_raw["r"]),
                annotator=str(ann_raw.get("annotator", "")),
                timestamp=int(ann_raw.get("timestamp", 0)),
            )
            entries.append(DatasetEntry(path=str(item["path"]), category=str(item["category"]), annotation=ann))
        except ManifestError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"malformed manifest entry {item!r}: {exc}") from exc
    return DatasetManifest(root=root, entries=tuple(entries))


def save_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    """Write the manifest atomically (temp file + rename)."""
    path = Path(path)
    payload = json.dumps(manifest_to_dict(manifest), indent=2) + "\n"
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(payload, encoding="utf-8")
    tmp.replace(path)


# ---------------------------------------------------------------------------
# benchmark


@dataclass(frozen=True)
class CategoryCell:
    method: str
    category: str
    hits: int
    total: int
    rate: float


@dataclass(frozen=True)
class MethodSummary:
    method: str
    hits: int
    total: int
    rate: float
    avg_robustness: float


@dataclass(frozen=True)
class TimingStats:
    method: str
    mean_s: float
    median_s: float
    min_s: float
    max_s: float

    @classmethod
    def from_samples(cls, method: str, samples: Sequence[float]) -> "TimingStats":
        return cls(
            method=method,
            mean_s=statistics.fmean(samples),
            median_s=statistics.median(samples),
            min_s=min(samples),
            max_s=max(samples),
        )


@dataclass(frozen=True)
class BenchReport:
    methods: tuple[str, ...]
    categories: tuple[str, ...]
    cells: tuple[CategoryCell, ...]
    summaries: tuple[MethodSummary, ...]
    timing: tuple[TimingStats, ...]

    def cell(self, method: str, category: str) -> CategoryCell:
        for c in self.cells:
            if c.method == method and c.category == category:
                return c
        raise KeyError((method, category))

    def summary(self, method: str) -> MethodSummary:
        for s in self.summaries:
            if s.method == method:
                return s
        raise KeyError(method)

    def timing_for(self, method: str) -> TimingStats:
        for t in self.timing:
            if t.method == method:
                return t
        raise KeyError(method)

    def to_json_dict(self) -> dict:
        return {
            "version": 1,
            "methods": list(self.methods),
            "categories": list(self.categories),
            "cells": [
                {
                    "method": c.method,
                    "category": c.category,
                    "hits": c.hits,
                    "total": c.total,
                    "rate": c.rate,
                }
                for c in self.cells
            ],
            "global": [
                {"method": s.method, "rate": s.rate, "avg_robustness": s.avg_robustness}
                for s in self.summaries
            ],
            "timing": [
                {
                    "method": t.method,
                    "mean_s": t.mean_s,
                    "median_s": t.median_s,
                    "min_s": t.min_s,
                    "max_s": t.max_s,
                }
                for t in self.timing
            ],
        }


def build_report(
    methods: Sequence[str],
    categories: Sequence[str],
    results: dict[str, list[tuple[DatasetEntry, Detection]]],
) -> BenchReport:
    """Aggregate per-image results into cells, summaries, and timing."""
    cells = []
    summaries = []
    timing = []
    for method in methods:
        rows = results[method]
        method_rates = []
        for category in categories:
            sub = [(det, e.annotation) for e, det in rows if e.category == category]
            hits = sum(1 for det, ann in sub if is_hit(relative_error(det, ann)))
            rate = round(100.0 * hits / len(sub), 2)
            cells.append(CategoryCell(method=method, category=category, hits=hits, total=len(sub), rate=rate))
            method_rates.append(rate)
        all_pairs = [(det, e.annotation) for e, det in rows]
        total_hits = sum(1 for det, ann in all_pairs if is_hit(relative_error(det, ann)))
        summaries.append(
            MethodSummary(
                method=method,
                hits=total_hits,
                total=len(all_pairs),
                rate=round(100.0 * total_hits / len(all_pairs), 2),
                avg_robustness=average_robustness(method_rates),
            )
        )
        timing.append(TimingStats.from_samples(method, [det.elapsed for _, det in rows]))
    return BenchReport(
        methods=tuple(methods),
        categories=tuple(categories),
        cells=tuple(cells),
        summaries=tuple(summaries),
        timing=tuple(timing),
    )


def run_benchmark(
    manifest: DatasetManifest,
    methods: Sequence[str] = METHODS,
    configs: dict | None = None,
    repeat: int = DEFAULT_REPEAT,
    progress: Callable[[str], None] | None = None,
) -> BenchReport:
    """Run the selected detectors over every manifest image.

    Each image is decoded once; each detector runs ``repeat`` times and
    records the minimum elapsed time (detection output is deterministic,
    so only timing varies). Errored detections count as misses.
    """
    if repeat < 1:
        raise ValueError(f"repeat must be >= 1, got {repeat}")
    methods = [m.upper() for m in methods]
    for m in methods:
        if m not in _DETECTORS:
            raise ManifestError(f"unknown method {m!r}")
    if not manifest.entries:
        raise ManifestError("manifest has no images")

    categories = [c for c in CATEGORIES if any(e.category == c for e in manifest.entries)]
    results: dict[str, list[tuple[DatasetEntry, Detection]]] = {m: [] for m in methods}
    configs = configs or {}

    for entry in manifest.entries:
        path = manifest.resolve(entry)
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise ManifestError(f"cannot read image {path}: {exc}") from exc
        try:
            img = decode(data)
        except DecodeError as exc:
            raise ManifestError(f"cannot decode image {path}: {exc}") from exc
        ann = entry.annotation
        if not (0 <= ann.cx < img.width and 0 <= ann.cy < img.height):
            raise ManifestError(f"annotation center outside image bounds for {entry.path}")
        for method in methods:
            cfg = configs.get(method)
            runs = [detect_with_method(method, img, cfg) for _ in range(repeat)]
            best_time = min(d.elapsed for d in runs)
            det = dataclasses.replace(runs[-1], elapsed=best_time)
            results[method].append((entry, det))
        if progress is not None:
            progress(entry.path)

    return build_report(methods, categories, results)


# ---------------------------------------------------------------------------
# report rendering


def render_report(report: BenchReport, fmt: str = "json") -> bytes:
    """Serialize a report; byte-stable for equal input."""
    if fmt == "json":
        return (json.dumps(report.to_json_dict(), indent=2) + "\n").encode("utf-8")
    if fmt == "markdown":
        return _render_markdown(report).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def _render_markdown(report: BenchReport) -> str:
    lines = ["# Pupil detection benchmark", ""]

    lines.append("## Hit rate by category")
    lines.append("")
    header = ["Method"] + list(report.categories) + ["Global"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for method in report.methods:
        row = [method]
        for category in report.categories:
            c = report.cell(method, category)
            row.append(f"{c.hits}/{c.total} ({c.rate:.2f}%)")
        s = report.summary(method)
        row.append(f"{s.hits}/{s.total} ({s.rate:.2f}%)")
        lines.append("| " + " | ".join(row) + " |")
    lines.append("")

    lines.append("## Robustness")
    lines.append("")
    header = ["Method"] + [f"{c} %" for c in report.categories] + ["Average robustness %"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for method in report.methods:
        row = [method]
        for category in report.categories:
            row.append(f"{report.cell(method, category).rate:.2f}")
        row.append(f"{report.summary(method).avg_robustness:.2f}")
        lines.append("| " + " | ".join(row) + " |")
    lines.append("")

    lines.append("## Timing (seconds per image)")
    lines.append("")
    header = ["Method", "mean", "median", "min", "max"]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    for method in report.methods:
        t = report.timing_for(method)
        lines.append(
            f"| {method} | {t.mean_s:.6f} | {t.median_s:.6f} | {t.min_s:.6f} | {t.max_s:.6f} |"
        )
    lines.append("")
    return "\n".join(lines)


def strip_timing(report_dict: dict) -> dict:
    """Copy of a report dict without the wall-clock dependent fields."""
    out = {k: v for k, v in report_dict.items() if k != "timing"}
    return out


# ---------------------------------------------------------------------------
# synthetic corpus


def apportion(count: int, weights: Sequence[int | float]) -> list[int]:
    """Largest-remainder apportionment of ``count`` items over ``weights``."""
    if count < 0:
        raise ValueError("count must be non-negative")
    total = float(sum(weights))
    quotas = [count * w / total for w in weights]
    floors = [int(math.floor(q)) for q in quotas]
    remaining = count - sum(floors)
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - floors[i]), i))
    for i in order[:remaining]:
        floors[i] += 1
    return floors
