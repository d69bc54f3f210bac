# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled hot kernels.

Mirrors ``_kernels_py`` exactly: same arithmetic order, same rounding,
same tie rules. Built with -ffp-contract=off so float results stay
comparable with the numpy backend.
"""

from libc.math cimport cos, fabs, floor, round as c_round, sin, sqrt, M_PI

import numpy as np

NAME = "compiled"


def canny_nms(const double[:, ::1] mag, const double[:, ::1] gx, const double[:, ::1] gy):
    cdef Py_ssize_t h = mag.shape[0]
    cdef Py_ssize_t w = mag.shape[1]
    out = np.zeros((h, w), dtype=np.uint8)
    if h < 3 or w < 3:
        return out
    cdef unsigned char[:, ::1] o = out
    cdef double t_lo = sqrt(2.0) - 1.0
    cdef double t_hi = sqrt(2.0) + 1.0
    cdef Py_ssize_t y, x
    cdef double m, ax, ay, back, fwd
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            m = mag[y, x]
            if m <= 0.0:
                continue
            ax = fabs(gx[y, x])
            ay = fabs(gy[y, x])
            if ay <= t_lo * ax:
                back = mag[y, x - 1]
                fwd = mag[y, x + 1]
            elif ay >= t_hi * ax:
                back = mag[y - 1, x]
                fwd = mag[y + 1, x]
            elif gx[y, x] * gy[y, x] > 0.0:
                back = mag[y - 1, x - 1]
                fwd = mag[y + 1, x + 1]
            else:
                back = mag[y - 1, x + 1]
                fwd = mag[y + 1, x - 1]
            if m > back and m >= fwd:
                o[y, x] = 1
    return out


def hough_vote(
    const int[::1] ys,
    const int[::1] xs,
    const int[::1] starts,
    const int[::1] off_dy,
    const int[::1] off_dx,
    int height,
    int width,
):
    cdef Py_ssize_t n_r = starts.shape[0] - 1
    cdef Py_ssize_t n_e = ys.shape[0]
    acc = np.zeros((n_r, height, width), dtype=np.int32)
    cdef int[:, :, ::1] a = acc
    cdef Py_ssize_t ri, e, k
    cdef int ty, tx
    for ri in range(n_r):
        for e in range(n_e):
            for k in range(starts[ri], starts[ri + 1]):
                ty = ys[e] + off_dy[k]
                tx = xs[e] + off_dx[k]
                if 0 <= ty < height and 0 <= tx < width:
                    a[ri, ty, tx] += 1
    return acc


cdef inline double _round_away(double v) nogil:
    cdef double r = floor(fabs(v) + 0.5)
    return -r if v < 0.0 else r


def rst_accumulate(
    const double[:, ::1] gx,
    const double[:, ::1] gy,
    const double[:, ::1] mag,
    int n,
    double thresh,
):
    cdef Py_ssize_t h = mag.shape[0]
    cdef Py_ssize_t w = mag.shape[1]
    orient = np.zeros((h, w), dtype=np.float64)
    magsum = np.zeros((h, w), dtype=np.float64)
    cdef double[:, ::1] ov = orient
    cdef double[:, ::1] mv = magsum
    cdef Py_ssize_t y, x
    cdef Py_ssize_t ty, tx
    cdef double m, scale
    for y in range(h):
        for x in range(w):
            m = mag[y, x]
            if m > thresh:
                scale = (<double> n) / m
                tx = x - <Py_ssize_t> _round_away(gx[y, x] * scale)
                ty = y - <Py_ssize_t> _round_away(gy[y, x] * scale)
                if 0 <= ty < h and 0 <= tx < w:
                    ov[ty, tx] -= 1.0
                    mv[ty, tx] -= m
    return orient, magsum


def ido_means(
    const double[:, ::1] img,
    const int[::1] ys,
    const int[::1] xs,
    const int[::1] radii,
):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef Py_ssize_t nc = ys.shape[0]
    cdef Py_ssize_t nr = radii.shape[0]
    means = np.zeros((nc, nr), dtype=np.float64)
    valid = np.zeros((nc, nr), dtype=np.uint8)
    cdef double[:, ::1] mout = means
    cdef unsigned char[:, ::1] vout = valid
    cdef Py_ssize_t i, j, k, cnt, x0, y0
    cdef int r, m
    cdef double step, ang, px, py, fx, fy, v, s
    for j in range(nr):
        r = radii[j]
        m = <int> c_round(2.0 * M_PI * (<double> r))
        if m < 8:
            m = 8
        step = 2.0 * M_PI / m
        for i in range(nc):
            cnt = 0
            s = 0.0
            for k in range(m):
                ang = (<double> k) * step
                px = (<double> xs[i]) + (<double> r) * cos(ang)
                py = (<double> ys[i]) + (<double> r) * sin(ang)
                if px >= 0.0 and px <= w - 1.0 and py >= 0.0 and py <= h - 1.0:
                    x0 = <Py_ssize_t> floor(px)
                    fx = px - x0
                    if x0 == w - 1:
                        x0 -= 1
                        fx = 1.0
                    y0 = <Py_ssize_t> floor(py)
                    fy = py - y0
                    if y0 == h - 1:
                        y0 -= 1
                        fy = 1.0
                    v = (1.0 - fy) * ((1.0 - fx) * img[y0, x0] + fx * img[y0, x0 + 1]) \
                        + fy * ((1.0 - fx) * img[y0 + 1, x0] + fx * img[y0 + 1, x0 + 1])
                    s += v
                    cnt += 1
            if 2 * cnt >= m:
                mout[i, j] = s / cnt
                vout[i, j] = 1
    return means, valid
