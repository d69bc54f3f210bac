"""Circular Hough Transform pupil detector.

The whole detection runs on the 4x-downsampled image: Canny edges vote
into a 3-parameter accumulator (center x, center y, radius), one vote per
cell on the rasterized circle of each radius around each edge pixel. The
globally maximal cell is the pupil circle, mapped back to full
resolution.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels, imaging
from .errors import NoCircleFound, NoEdges
from .model import Circle, Detection


@dataclass(frozen=True)
class ChtConfig:
    r_min: int = 5
    r_max: int = 25
    canny_low: float = 40.0
    canny_high: float = 100.0
    min_votes: int = 3  # sanity floor rejecting structureless inputs

    def __post_init__(self):
        if not 1 <= self.r_min <= self.r_max:
            raise ValueError(f"need 1 <= r_min <= r_max, got {self.r_min}..{self.r_max}")


@dataclass
class HoughAccumulator:
    """Vote counts indexed as (radius bin, center y, center x)."""

    votes: np.ndarray
    r_min: int
    r_max: int

    @classmethod
    def zeros(cls, height: int, width: int, r_min: int, r_max: int) -> "HoughAccumulator":
        n_r = r_max - r_min + 1
        return cls(votes=np.zeros((n_r, height, width), dtype=np.int32), r_min=r_min, r_max=r_max)


@lru_cache(maxsize=64)
def midpoint_circle(r: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer offsets of the midpoint-rasterized circle of radius r.

    Offsets are deduplicated (octant seams would otherwise repeat) and
    sorted, so each cell is touched at most once per vote.
    """
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    pts = set()
    x, y, d = r, 0, 1 - r
    while x >= y:
        pts.update(
            {(x, y), (-x, y), (x, -y), (-x, -y), (y, x), (-y, x), (y, -x), (-y, -x)}
        )
        y += 1
        if d < 0:
            d += 2 * y + 1
        else:
            x -= 1
            d += 2 * (y - x) + 1
    ordered = sorted(pts)
    dx = np.array([p[0] for p in ordered], dtype=np.int32)
    dy = np.array([p[1] for p in ordered], dtype=np.int32)
    dx.setflags(write=False)
    dy.setflags(write=False)
    return dy, dx


def vote_circle(acc: HoughAccumulator, edge: tuple[int, int], r: int) -> None:
    """Add one vote to every in-bounds cell of radius r around an edge pixel."""
    if not acc.r_min <= r <= acc.r_max:
        raise ValueError(f"radius {r} outside accumulator range {acc.r_min}..{acc.r_max}")
    ex, ey = edge
    dy, dx = midpoint_circle(r)
    ty = ey + dy
    tx = ex + dx
    plane = acc.votes[r - acc.r_min]
    ok = (ty >= 0) & (ty < plane.shape[0]) & (tx >= 0) & (tx < plane.shape[1])
    plane[ty[ok], tx[ok]] += 1


def _offset_table(r_min: int, r_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flattened per-radius circle offsets plus slice boundaries."""
    dys, dxs, starts = [], [], [0]
    for r in range(r_min, r_max + 1):
        dy, dx = midpoint_circle(r)
        dys.append(dy)
        dxs.append(dx)
        starts.append(starts[-1] + len(dy))
    return (
        np.array(starts, dtype=np.int32),
        np.concatenate(dys).astype(np.int32),
        np.concatenate(dxs).astype(np.int32),
    )


def accumulate(edges: imaging.BinaryImage, r_min: int, r_max: int) -> HoughAccumulator:
    """Vote all edge pixels over all radii; equals repeated vote_circle calls."""
    ys, xs = np.nonzero(edges.pixels)
    starts, off_dy, off_dx = _offset_table(r_min, r_max)
    votes = _kernels.hough_vote(
        ys.astype(np.int32),
        xs.astype(np.int32),
        starts,
        off_dy,
        off_dx,
        edges.height,
        edges.width,
    )
    return HoughAccumulator(votes=votes, r_min=r_min, r_max=r_max)


def cht_detect(img: imaging.GrayImage, cfg: ChtConfig = ChtConfig()) -> Detection:
    """Detect the pupil circle; raises NoEdges / NoCircleFound on failure."""
    t0 = time.perf_counter()
    small = imaging.downsample4(img)
    edges = imaging.canny(small, cfg.canny_low, cfg.canny_high)
    if not edges.pixels.any():
        raise NoEdges("edge map is empty")
    acc = accumulate(edges, cfg.r_min, cfg.r_max)
    best = int(np.argmax(acc.votes))
    best_votes = int(acc.votes.flat[best])
    if best_votes < cfg.min_votes:
        raise NoCircleFound(f"strongest cell has {best_votes} votes (< {cfg.min_votes})")
    # flat argmax scans (r, y, x) in order, which is exactly the tie rule
    ri, y, x = np.unravel_index(best, acc.votes.shape)
    cx = imaging.to_full_res(float(x))
    cy = imaging.to_full_res(float(y))
    r_full = float(ri + cfg.r_min) * imaging.DOWNSAMPLE_FACTOR
    return Detection(
        method="CHT",
        cx=cx,
        cy=cy,
        shape=Circle(cx=cx, cy=cy, r=r_full),
        score=float(best_votes),
        elapsed=time.perf_counter() - t0,
    )
