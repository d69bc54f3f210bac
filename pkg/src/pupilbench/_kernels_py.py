"""Numpy implementations of the hot kernels.

This is the fallback backend used when the compiled extension is not
built. Every function here mirrors its twin in ``_kernels_cy.pyx``:
same argument dtypes, same arithmetic order, same tie rules. Integer
outputs are bit-identical across the two backends; float accumulations
may differ in the last ulps only (numpy uses pairwise summation).
"""

from __future__ import annotations

import math

import numpy as np

NAME = "python"

_TAN_LO = math.sqrt(2.0) - 1.0  # tan(22.5 deg)
_TAN_HI = math.sqrt(2.0) + 1.0  # tan(67.5 deg)


def canny_nms(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Non-maximum suppression of a gradient magnitude field.

    Direction is quantized to 4 bins from (gx, gy). A pixel survives when
    its magnitude is strictly greater than the backward neighbour and at
    least the forward neighbour along the gradient direction; the
    asymmetry keeps ideal step edges one pixel wide. The outer 1-pixel
    border is always suppressed.
    """
    h, w = mag.shape
    out = np.zeros((h, w), dtype=np.uint8)
    if h < 3 or w < 3:
        return out

    c = mag[1:-1, 1:-1]
    ax = np.abs(gx[1:-1, 1:-1])
    ay = np.abs(gy[1:-1, 1:-1])
    sign_pp = gx[1:-1, 1:-1] * gy[1:-1, 1:-1] > 0.0

    horiz = ay <= _TAN_LO * ax
    vert = ay >= _TAN_HI * ax
    diag = ~horiz & ~vert

    keep = np.zeros_like(c, dtype=bool)
    # bin 0: gradient ~horizontal, compare along x
    keep |= horiz & (c > mag[1:-1, :-2]) & (c >= mag[1:-1, 2:])
    # bin 2: gradient ~vertical, compare along y
    keep |= vert & (c > mag[:-2, 1:-1]) & (c >= mag[2:, 1:-1])
    # bin 1: gradient along (+1,+1)
    keep |= diag & sign_pp & (c > mag[:-2, :-2]) & (c >= mag[2:, 2:])
    # bin 3: gradient along (+1,-1)
    keep |= diag & ~sign_pp & (c > mag[:-2, 2:]) & (c >= mag[2:, :-2])

    out[1:-1, 1:-1] = (keep & (c > 0.0)).astype(np.uint8)
    return out


def hough_vote(
    ys: np.ndarray,
    xs: np.ndarray,
    starts: np.ndarray,
    off_dy: np.ndarray,
    off_dx: np.ndarray,
    height: int,
    width: int,
) -> np.ndarray:
    """Accumulate circle votes for every (edge pixel, radius) pair.

    ``starts`` delimits, per radius plane, the slice of the flattened
    circle-offset arrays. Returns an int32 accumulator of shape
    (n_radii, height, width).
    """
    n_r = len(starts) - 1
    acc = np.zeros((n_r, height, width), dtype=np.int32)
    if len(ys) == 0:
        return acc
    for ri in range(n_r):
        dy = off_dy[starts[ri]:starts[ri + 1]]
        dx = off_dx[starts[ri]:starts[ri + 1]]
        ty = ys[:, None] + dy[None, :]
        tx = xs[:, None] + dx[None, :]
        ok = (ty >= 0) & (ty < height) & (tx >= 0) & (tx < width)
        lin = (ty * width + tx)[ok]
        counts = np.bincount(lin, minlength=height * width)
        acc[ri] = counts.astype(np.int32).reshape(height, width)
    return acc


def rst_accumulate(
    gx: np.ndarray,
    gy: np.ndarray,
    mag: np.ndarray,
    n: int,
    thresh: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Dark-region radial-symmetry projections for one radius.

    Every pixel with gradient magnitude above ``thresh`` casts a vote at
    the pixel n steps against its gradient direction: the orientation
    image is decremented by 1, the magnitude image by the gradient
    magnitude. Out-of-image targets are skipped.
    """
    h, w = mag.shape
    orient = np.zeros(h * w, dtype=np.float64)
    magsum = np.zeros(h * w, dtype=np.float64)
    sel = mag > thresh
    if sel.any():
        ys, xs = np.nonzero(sel)
        m = mag[sel]
        scale = float(n) / m
        dxf = gx[sel] * scale
        dyf = gy[sel] * scale
        # round half away from zero, matching the compiled kernel
        dxi = (np.sign(dxf) * np.floor(np.abs(dxf) + 0.5)).astype(np.int64)
        dyi = (np.sign(dyf) * np.floor(np.abs(dyf) + 0.5)).astype(np.int64)
        ty = ys - dyi
        tx = xs - dxi
        ok = (ty >= 0) & (ty < h) & (tx >= 0) & (tx < w)
        lin = (ty * w + tx)[ok]
        orient -= np.bincount(lin, minlength=h * w).astype(np.float64)
        magsum -= np.bincount(lin, weights=m[ok], minlength=h * w)
    return orient.reshape(h, w), magsum.reshape(h, w)


def ido_means(
    img: np.ndarray,
    ys: np.ndarray,
    xs: np.ndarray,
    radii: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Circular contour means for every (candidate, radius) pair.

    Each circle is sampled at max(8, round(2*pi*r)) equiangular points
    with bilinear interpolation. A (candidate, radius) cell is valid when
    at least half the samples fall inside the image; its mean covers the
    in-bounds samples only.
    """
    h, w = img.shape
    nc = len(ys)
    nr = len(radii)
    means = np.zeros((nc, nr), dtype=np.float64)
    valid = np.zeros((nc, nr), dtype=np.uint8)
    if nc == 0:
        return means, valid
    xs_f = xs.astype(np.float64)
    ys_f = ys.astype(np.float64)
    for j in range(nr):
        r = int(radii[j])
        m = max(8, int(round(2.0 * math.pi * r)))
        step = 2.0 * math.pi / m
        ang = np.arange(m, dtype=np.float64) * step
        ox = float(r) * np.cos(ang)
        oy = float(r) * np.sin(ang)
        px = xs_f[:, None] + ox[None, :]
        py = ys_f[:, None] + oy[None, :]
        inb = (px >= 0.0) & (px <= w - 1.0) & (py >= 0.0) & (py <= h - 1.0)

        x0 = np.floor(px).astype(np.int64)
        y0 = np.floor(py).astype(np.int64)
        fx = px - x0
        fy = py - y0
        # exact right/bottom boundary: interpolate from the last interior cell
        at_r = x0 == w - 1
        x0 = np.where(at_r, x0 - 1, x0)
        fx = np.where(at_r, 1.0, fx)
        at_b = y0 == h - 1
        y0 = np.where(at_b, y0 - 1, y0)
        fy = np.where(at_b, 1.0, fy)
        x0c = np.clip(x0, 0, w - 2)
        y0c = np.clip(y0, 0, h - 2)

        v00 = img[y0c, x0c]
        v01 = img[y0c, x0c + 1]
        v10 = img[y0c + 1, x0c]
        v11 = img[y0c + 1, x0c + 1]
        val = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) + fy * ((1.0 - fx) * v10 + fx * v11)

        cnt = inb.sum(axis=1)
        sums = np.where(inb, val, 0.0).sum(axis=1)
        ok = 2 * cnt >= m
        nonzero = np.maximum(cnt, 1)
        means[:, j] = np.where(ok, sums / nonzero, 0.0)
        valid[:, j] = ok.astype(np.uint8)
    return means, valid
