"""Integro-differential operator pupil detector.

Runs on the 4x-downsampled image after specular-spot removal. Dark 3x3
local minima are the only candidate centers; for each candidate the
perimeter-normalized contour integral of intensity is evaluated over the
radius range, differentiated in r, smoothed with a small Gaussian along
r, and the (candidate, radius) pair with the largest absolute response
wins.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import _kernels, imaging
from .errors import NoCandidates, NoMaximum, TooFewRadii
from .model import Circle, Detection


@dataclass(frozen=True)
class IdoConfig:
    r_min: int = 5
    r_max: int = 25
    threshold: int = 25
    bright_threshold: int = 200
    sigma_r: float = 1.0
    smooth_window: int = 3

    def __post_init__(self):
        if not 1 <= self.r_min <= self.r_max:
            raise ValueError(f"need 1 <= r_min <= r_max, got {self.r_min}..{self.r_max}")


@dataclass(frozen=True)
class IdoCandidateSet:
    """Pixels surviving the dark local-minimum pruning, in row-major order."""

    xs: np.ndarray
    ys: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        for name in ("xs", "ys"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int32)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.xs)


def prune_candidates(img: imaging.GrayImage, threshold: int = 25) -> IdoCandidateSet:
    """Keep dark pixels that are 3x3 local minima.

    Ties are allowed for the minimum test, but among tied neighbours only
    the first pixel in row-major order survives: a candidate is dropped
    when an already-kept candidate sits in its 3x3 neighbourhood (tied
    neighbours are the only way two candidates can be adjacent).
    """
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {threshold}")
    pixels = img.pixels
    local_min = pixels == ndimage.minimum_filter(pixels, size=3, mode="constant", cval=255)
    mask = local_min & (pixels <= threshold)
    ys, xs = np.nonzero(mask)
    kept = np.zeros(pixels.shape, dtype=bool)
    keep_xs, keep_ys = [], []
    h, w = pixels.shape
    for y, x in zip(ys.tolist(), xs.tolist()):
        y0, y1 = max(y - 1, 0), min(y + 2, h)
        x0, x1 = max(x - 1, 0), min(x + 2, w)
        if kept[y0:y1, x0:x1].any():
            continue
        kept[y, x] = True
        keep_ys.append(y)
        keep_xs.append(x)
    return IdoCandidateSet(
        xs=np.array(keep_xs, dtype=np.int32),
        ys=np.array(keep_ys, dtype=np.int32),
        width=w,
        height=h,
    )


def contour_mean(img: imaging.GrayImage, center: tuple[int, int], r: int) -> float | None:
    """Mean intensity along the circle of radius r, or None when more than
    half of the max(8, round(2*pi*r)) bilinear samples fall outside the
    image."""
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    x, y = center
    means, valid = _kernels.ido_means(
        img.as_float(),
        np.array([y], dtype=np.int32),
        np.array([x], dtype=np.int32),
        np.array([r], dtype=np.int32),
    )
    return float(means[0, 0]) if valid[0, 0] else None


def ido_score(means: np.ndarray, sigma_r: float = 1.0, window: int = 3) -> np.ndarray:
    """Absolute smoothed radial derivative of a contour-mean profile.

    Central finite differences inside, one-sided at the endpoints, then a
    1-D Gaussian along the radius axis (replicate border), then the
    absolute value.
    """
    m = np.asarray(means, dtype=np.float64)
    if m.ndim != 1:
        raise ValueError("means must be a 1-D profile over consecutive radii")
    if len(m) < 3:
        raise TooFewRadii(f"need at least 3 consecutive radii, got {len(m)}")
    d = np.empty_like(m)
    d[1:-1] = (m[2:] - m[:-2]) / 2.0
    d[0] = m[1] - m[0]
    d[-1] = m[-1] - m[-2]
    k = imaging.gaussian_kernel1d(sigma_r, window)
    smoothed = ndimage.correlate1d(d, k, mode="nearest")
    return np.abs(smoothed)


def _valid_runs(valid_row: np.ndarray) -> list[tuple[int, int]]:
    """[start, stop) index ranges of consecutive valid radii."""
    runs = []
    start = None
    for i, v in enumerate(valid_row):
        if v and start is None:
            start = i
        elif not v and start is not None:
            runs.append((start, i))
            start = None
    if start is not None:
        runs.append((start, len(valid_row)))
    return runs


def score_table(
    img: imaging.GrayImage,
    candidates: IdoCandidateSet,
    r_min: int,
    r_max: int,
    sigma_r: float = 1.0,
    window: int = 3,
) -> np.ndarray:
    """Operator scores of shape (n_candidates, n_radii); unscorable cells are 0.

    Only consecutive runs of at least 3 valid radii are differentiated;
    radii in shorter runs (or with invalid contour means) score 0.
    """
    radii = np.arange(r_min, r_max + 1, dtype=np.int32)
    means, valid = _kernels.ido_means(img.as_float(), candidates.ys, candidates.xs, radii)
    scores = np.zeros_like(means)
    for i in range(len(candidates)):
        for start, stop in _valid_runs(valid[i]):
            if stop - start >= 3:
                scores[i, start:stop] = ido_score(means[i, start:stop], sigma_r, window)
    return scores


def ido_detect(img: imaging.GrayImage, cfg: IdoConfig = IdoConfig()) -> Detection:
    """Detect the pupil circle; raises NoCandidates / NoMaximum on failure."""
    t0 = time.perf_counter()
    small = imaging.downsample4(img)
    cleaned = imaging.remove_light_spots(small, cfg.bright_threshold)
    candidates = prune_candidates(cleaned, cfg.threshold)
    if len(candidates) == 0:
        raise NoCandidates("no dark local minima below the threshold")
    scores = score_table(
        cleaned, candidates, cfg.r_min, cfg.r_max, cfg.sigma_r, cfg.smooth_window
    )
    # argmax over the (radius, candidate) layout realizes the (r, y, x)
    # tie rule, since candidates are stored in row-major order
    by_radius = scores.T
    best = int(np.argmax(by_radius))
    best_score = float(by_radius.flat[best])
    if best_score <= 0.0:
        raise NoMaximum("operator response is zero everywhere")
    ri, ci = np.unravel_index(best, by_radius.shape)
    cx = imaging.to_full_res(float(candidates.xs[ci]))
    cy = imaging.to_full_res(float(candidates.ys[ci]))
    r_full = float(cfg.r_min + ri) * imaging.DOWNSAMPLE_FACTOR
    return Detection(
        method="IDO",
        cx=cx,
        cy=cy,
        shape=Circle(cx=cx, cy=cy, r=r_full),
        score=best_score,
        elapsed=time.perf_counter() - t0,
    )
