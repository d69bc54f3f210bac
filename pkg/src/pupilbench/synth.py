"""Synthetic eye-image generator with exact ground truth.

Renders a dark pupil inside a mid-gray iris on a bright sclera with
anti-aliased edges, then optionally degrades the scene the way real
recordings do: an eyelid cap, dark eyelash strokes, saturated specular
glints, and additive Gaussian noise. Everything is deterministic for a
fixed seed.

The pupil gets a slightly darker core (a few intensity levels over a few
pixels) so its center remains a strict local minimum after downsampling;
perfectly flat pupils would make the candidate-pruning tie rule depend
on pixel parity.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import InvalidGeometry
from .evaluation import (
    CATEGORIES,
    DEFAULT_PROPORTIONS,
    DatasetEntry,
    DatasetManifest,
    apportion,
    save_manifest,
)
from .imaging import GrayImage, encode_pgm
from .model import Annotation


def _coverage(signed_dist: np.ndarray) -> np.ndarray:
    """1-pixel anti-aliasing ramp from a signed distance (positive inside)."""
    return np.clip(signed_dist + 0.5, 0.0, 1.0)


def _blend(canvas: np.ndarray, value: float, alpha: np.ndarray) -> None:
    canvas *= 1.0 - alpha
    canvas += value * alpha


def _eyelid_level(fraction: float) -> float:
    """Normalized chord height t such that the unit-disk area with y <= t
    equals the requested fraction (y grows downward)."""
    if fraction <= 0.0:
        return -1.0
    if fraction >= 1.0:
        return 1.0

    def area(t: float) -> float:
        return (t * math.sqrt(1.0 - t * t) + math.asin(t) + math.pi / 2.0) / math.pi

    lo, hi = -1.0, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2.0
        if area(mid) < fraction:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def synth_eye(
    *,
    center: tuple[float, float] = (320.0, 240.0),
    pupil_radius: float = 40.0,
    pupil_axes: tuple[float, float, float] | None = None,
    iris_radius: float = 90.0,
    size: tuple[int, int] = (640, 480),
    pupil_intensity: float = 10.0,
    iris_intensity: float = 100.0,
    sclera_intensity: float = 220.0,
    eyelid_fraction: float = 0.0,
    stroke_count: int = 0,
    glint_count: int = 0,
    frame_count: int = 0,
    glare_count: int = 0,
    noise_sigma: float = 0.0,
    seed: int = 0,
    core_depth: float = 6.0,
    core_radius: float = 6.0,
) -> tuple[GrayImage, Annotation]:
    """Render a synthetic eye and return it with its exact annotation.

    ``pupil_axes`` as (a, b, theta) makes the pupil elliptical and
    overrides ``pupil_radius``; the annotation radius is then the mean
    semi-axis. Disturbances: ``eyelid_fraction`` covers that fraction of
    the pupil with a straight horizontal cap, ``stroke_count`` draws
    eyelash-like dark polylines over the iris, ``glint_count`` puts small
    saturated corneal reflections inside the pupil area, ``frame_count``
    adds thick dark eyeglass-frame bars outside the iris, and
    ``glare_count`` adds large saturated lens reflections near the iris
    rim. Raises InvalidGeometry when the pupil does not fit inside the
    iris, the iris inside the image, or the eyelid fraction is outside
    [0, 0.9).
    """
    width, height = size
    cx, cy = center
    if pupil_axes is not None:
        pa, pb, ptheta = pupil_axes
        if not (pa >= pb > 0):
            raise InvalidGeometry(f"pupil axes must satisfy a >= b > 0, got {pa}, {pb}")
        pupil_extent = pa
        ann_r = (pa + pb) / 2.0
    else:
        if not pupil_radius > 0:
            raise InvalidGeometry(f"pupil radius must be positive, got {pupil_radius}")
        pa = pb = pupil_extent = pupil_radius
        ptheta = 0.0
        ann_r = pupil_radius
    if pupil_extent >= iris_radius:
        raise InvalidGeometry(f"pupil (extent {pupil_extent}) must fit inside the iris ({iris_radius})")
    if cx - iris_radius < 0 or cx + iris_radius > width - 1 or cy - iris_radius < 0 or cy + iris_radius > height - 1:
        raise InvalidGeometry("iris must fit inside the image")
    if not 0.0 <= eyelid_fraction < 0.9:
        raise InvalidGeometry(f"eyelid fraction must be in [0, 0.9), got {eyelid_fraction}")

    rng = np.random.default_rng(seed)
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    canvas = np.full((height, width), float(sclera_intensity))

    dist = np.hypot(xs - cx, ys - cy)
    _blend(canvas, float(iris_intensity), _coverage(iris_radius - dist))

    ct, st = math.cos(ptheta), math.sin(ptheta)
    xr = (xs - cx) * ct + (ys - cy) * st
    yr = -(xs - cx) * st + (ys - cy) * ct
    rho = np.hypot(xr / pa, yr / pb)
    pupil_alpha = _coverage((1.0 - rho) * pb)
    _blend(canvas, float(pupil_intensity), pupil_alpha)

    if core_depth > 0 and core_radius > 0:
        dip = core_depth * np.clip(1.0 - dist / core_radius, 0.0, 1.0)
        canvas -= dip * pupil_alpha
        np.clip(canvas, 0.0, 255.0, out=canvas)

    if eyelid_fraction > 0:
        t = _eyelid_level(eyelid_fraction)
        y_lid = cy + t * pb
        _blend(canvas, float(sclera_intensity), _coverage(y_lid - ys))

    for _ in range(max(0, stroke_count)):
        a0 = rng.uniform(math.pi, 2.0 * math.pi)  # upper half of the eye
        a1 = a0 + rng.uniform(-0.9, 0.9)
        r0 = rng.uniform(pupil_extent + 4.0, iris_radius)
        r1 = rng.uniform(pupil_extent + 4.0, iris_radius * 1.15)
        p0 = (cx + r0 * math.cos(a0), cy + r0 * math.sin(a0))
        p1 = (cx + r1 * math.cos(a1), cy + r1 * math.sin(a1))
        _draw_segment(canvas, xs, ys, p0, p1, width_px=rng.uniform(1.2, 2.2), value=30.0)

    for _ in range(max(0, frame_count)):
        # dark frame bar tangent to a circle well outside the iris
        phi = rng.uniform(0.0, 2.0 * math.pi)
        d = iris_radius + rng.uniform(15.0, 45.0)
        nx, ny = math.cos(phi), math.sin(phi)
        mx, my = cx + d * nx, cy + d * ny
        span = float(width + height)
        p0 = (mx - ny * span, my + nx * span)
        p1 = (mx + ny * span, my - nx * span)
        _draw_segment(canvas, xs, ys, p0, p1, width_px=rng.uniform(7.0, 12.0),
                      value=rng.uniform(8.0, 20.0))

    for _ in range(max(0, glare_count)):
        # broad lens reflection near the iris rim
        phi = rng.uniform(0.0, 2.0 * math.pi)
        rad = iris_radius * rng.uniform(0.8, 1.25)
        gr = rng.uniform(16.0, 30.0)
        gx = cx + rad * math.cos(phi)
        gy = cy + rad * math.sin(phi)
        _blend(canvas, 255.0, _coverage(gr - np.hypot(xs - gx, ys - gy)))

    for _ in range(max(0, glint_count)):
        # corneal reflections sit inside the pupil area in frontal IR shots
        phi = rng.uniform(0.0, 2.0 * math.pi)
        rad = rng.uniform(0.0, 0.65 * pb)
        gr = rng.uniform(2.5, 5.5)
        gx = cx + rad * math.cos(phi)
        gy = cy + rad * math.sin(phi)
        _blend(canvas, 255.0, _coverage(gr - np.hypot(xs - gx, ys - gy)))

    if noise_sigma > 0:
        canvas += rng.normal(0.0, noise_sigma, canvas.shape)

    pixels = np.floor(np.clip(canvas, 0.0, 255.0) + 0.5).astype(np.uint8)
    return GrayImage(pixels), Annotation(cx=cx, cy=cy, r=ann_r, annotator="synthetic", timestamp=0)


def _draw_segment(canvas, xs, ys, p0, p1, width_px: float, value: float) -> None:
    sx, sy = p0
    ex, ey = p1
    vx, vy = ex - sx, ey - sy
    length_sq = vx * vx + vy * vy
    if length_sq == 0:
        return
    t = np.clip(((xs - sx) * vx + (ys - sy) * vy) / length_sq, 0.0, 1.0)
    d = np.hypot(xs - (sx + t * vx), ys - (sy + t * vy))
    _blend(canvas, value, _coverage(width_px / 2.0 - d))


# ---------------------------------------------------------------------------
# corpus generation


def generate_corpus(
    out_dir,
    count: int,
    seed: int,
    proportions=None,
    size: tuple[int, int] = (640, 480),
):
    """Write ``count`` synthetic images plus a manifest into ``out_dir``.

    The four disturbance categories are apportioned by largest remainder
    from ``proportions`` (defaults to the reference-corpus ratio). Scene
    parameters and per-image seeds all derive from the master seed, so
    two runs with the same arguments produce identical byte trees.
    Returns the manifest path.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    per_category = apportion(count, proportions or DEFAULT_PROPORTIONS)

    rng = np.random.default_rng(seed)
    width, height = size
    entries = []
    index = 0
    for category, n_images in zip(CATEGORIES, per_category):
        for _ in range(n_images):
            cx = rng.uniform(width * 0.39, width * 0.61)
            cy = rng.uniform(height * 0.40, height * 0.60)
            pupil_r = rng.uniform(32.0, 52.0)
            # keep the iris outside the detectors' radius search range
            # (close-up eye framing); the pupil is the only circle in range
            iris_r = rng.uniform(max(pupil_r + 40.0, 112.0), 168.0)
            kwargs = dict(
                center=(cx, cy),
                pupil_radius=pupil_r,
                iris_radius=iris_r,
                size=size,
                pupil_intensity=rng.uniform(8.0, 18.0),
                iris_intensity=rng.uniform(85.0, 125.0),
                sclera_intensity=rng.uniform(205.0, 235.0),
                noise_sigma=rng.uniform(0.4, 1.5),
                seed=int(rng.integers(0, 2**31)),
            )
            if category == "hair_eyelashes":
                kwargs["stroke_count"] = int(rng.integers(4, 11))
            elif category == "eyelid":
                kwargs["eyelid_fraction"] = rng.uniform(0.15, 0.45)
            elif category == "glasses_reflections":
                kwargs["glint_count"] = int(rng.integers(1, 4))
                kwargs["frame_count"] = int(rng.integers(1, 3))
                kwargs["glare_count"] = int(rng.integers(0, 3))
            img, ann = synth_eye(**kwargs)
            name = f"{index:04d}_{category}.pgm"
            (out_dir / name).write_bytes(encode_pgm(img))
            entries.append(DatasetEntry(path=name, category=category, annotation=ann))
            index += 1

    manifest = DatasetManifest(root=out_dir, entries=tuple(entries))
    manifest_path = out_dir / "manifest.json"
    save_manifest(manifest, manifest_path)
    return manifest_path
