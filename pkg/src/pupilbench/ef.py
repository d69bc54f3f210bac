"""Ellipse-fitting pupil detector.

Full-resolution pipeline: binarize (dark pupil becomes a hole in the
foreground), morphological closing with a disk, Canny edges, then the
longest 8-connected edge chain is fitted with the direct least-squares
ellipse method (constrained generalized eigenproblem, reduced to a 3x3
eigenproblem through the block structure of the constraint).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import imaging
from .errors import (
    DegenerateConfiguration,
    InsufficientPoints,
    NoContour,
    NotAnEllipse,
)
from .model import Detection, Ellipse

MIN_FIT_POINTS = 6


@dataclass(frozen=True)
class EfConfig:
    threshold: int = 25
    se_radius: int = 5
    canny_low: float = 40.0
    canny_high: float = 100.0


@dataclass(frozen=True)
class ConicCoefficients:
    """Coefficients of a*x^2 + b*x*y + c*y^2 + d*x + e*y + f = 0."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    @property
    def discriminant(self) -> float:
        """4ac - b^2; positive for ellipses."""
        return 4.0 * self.a * self.c - self.b * self.b

    def evaluate(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Algebraic distance of points from the conic."""
        return (
            self.a * x * x
            + self.b * x * y
            + self.c * y * y
            + self.d * x
            + self.e * y
            + self.f
        )


def extract_pupil_contour(
    img: imaging.GrayImage,
    threshold: int = 25,
    se_radius: int = 5,
    canny_low: float = 40.0,
    canny_high: float = 100.0,
) -> np.ndarray:
    """(N, 2) array of (x, y) edge positions of the longest edge chain.

    The binary mask is rescaled to {0, 255} before edge detection so the
    Canny thresholds keep their intensity-scale meaning.

    The work happens on the bounding box of below-threshold pixels plus a
    safety margin: closing moves mask boundaries by at most 2*se_radius
    and the edge detector's support adds 3 more pixels, so everything
    outside that box is constant foreground with no edges. The crop is an
    exact optimization (see the uncropped reference in the tests), not an
    approximation.
    """
    binary = imaging.threshold_binarize(img, threshold)
    dark = binary.pixels == 0
    if not dark.any():
        raise NoContour("no pixels at or below the threshold")
    margin = 2 * se_radius + 6
    rows = np.flatnonzero(dark.any(axis=1))
    cols = np.flatnonzero(dark.any(axis=0))
    y0 = max(int(rows[0]) - margin, 0)
    y1 = min(int(rows[-1]) + margin + 1, binary.height)
    x0 = max(int(cols[0]) - margin, 0)
    x1 = min(int(cols[-1]) + margin + 1, binary.width)

    crop = imaging.BinaryImage(binary.pixels[y0:y1, x0:x1])
    closed = imaging.close(crop, imaging.StructuringElement(se_radius))
    mask = imaging.GrayImage(closed.pixels * np.uint8(255))
    edges = imaging.canny(mask, canny_low, canny_high)
    components = imaging.connected_components(edges)
    if not components:
        raise NoContour("no edge components after binarize/close/canny")
    return components[0].points + np.array([x0, y0], dtype=np.int32)


def fit_ellipse_direct(points: np.ndarray) -> ConicCoefficients:
    """Direct least-squares ellipse fit of (x, y) points.

    Points are centered on their centroid and isotropically scaled by the
    mean absolute deviation before building the design matrix; the
    returned coefficients are denormalized back to image coordinates and
    scaled so that 4ac - b^2 = 1 exactly, with a > 0 as the canonical
    sign.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected an (N, 2) point array, got shape {pts.shape}")
    if len(pts) < MIN_FIT_POINTS:
        raise InsufficientPoints(f"need at least {MIN_FIT_POINTS} points, got {len(pts)}")

    mx, my = pts.mean(axis=0)
    dx = pts[:, 0] - mx
    dy = pts[:, 1] - my
    scale = (np.abs(dx).mean() + np.abs(dy).mean()) / 2.0
    if scale == 0.0:
        raise DegenerateConfiguration("all points coincide")
    u = dx / scale
    v = dy / scale

    d1 = np.stack([u * u, u * v, v * v], axis=1)
    d2 = np.stack([u, v, np.ones_like(u)], axis=1)
    s1 = d1.T @ d1
    s2 = d1.T @ d2
    s3 = d2.T @ d2
    try:
        t = -np.linalg.solve(s3, s2.T)
    except np.linalg.LinAlgError as exc:
        raise DegenerateConfiguration("linear block is singular (collinear points?)") from exc
    m = s1 + s2 @ t
    # premultiply by the inverse of the quadratic constraint block
    # [[0,0,2],[0,-1,0],[2,0,0]]
    m = np.array([m[2] / 2.0, -m[1], m[0] / 2.0])

    eigvals, eigvecs = np.linalg.eig(m)
    candidates = []
    for i in range(3):
        vec = eigvecs[:, i]
        lam = eigvals[i]
        if abs(np.imag(lam)) > 1e-8 * (1.0 + abs(np.real(lam))):
            continue
        vec = np.real(vec)
        cond = 4.0 * vec[0] * vec[2] - vec[1] ** 2
        if cond > 0:
            candidates.append(vec)
    if len(candidates) != 1:
        raise DegenerateConfiguration(
            f"{len(candidates)} eigenvectors satisfy the ellipse constraint (expected 1)"
        )
    a1 = candidates[0]
    a2 = t @ a1
    qa, qb, qc = a1
    qd, qe, qf = a2

    # undo the normalization u = (x - mx)/s, v = (y - my)/s
    s = scale
    a = qa / (s * s)
    b = qb / (s * s)
    c = qc / (s * s)
    d = -2.0 * qa * mx / (s * s) - qb * my / (s * s) + qd / s
    e = -qb * mx / (s * s) - 2.0 * qc * my / (s * s) + qe / s
    f = (
        qa * mx * mx / (s * s)
        + qb * mx * my / (s * s)
        + qc * my * my / (s * s)
        - qd * mx / s
        - qe * my / s
        + qf
    )

    disc = 4.0 * a * c - b * b
    if disc <= 0:
        raise DegenerateConfiguration("fit collapsed to a non-ellipse conic")
    k = math.sqrt(disc)
    coeffs = np.array([a, b, c, d, e, f]) / k
    if coeffs[0] < 0:
        coeffs = -coeffs
    return ConicCoefficients(*coeffs)


def conic_to_ellipse(c: ConicCoefficients) -> Ellipse:
    """Convert conic coefficients to center, semi-axes, and orientation."""
    disc = c.discriminant
    if disc <= 0:
        raise NotAnEllipse(f"4ac - b^2 = {disc} is not positive")
    x0 = (c.b * c.e - 2.0 * c.c * c.d) / disc
    y0 = (c.b * c.d - 2.0 * c.a * c.e) / disc
    f_center = c.evaluate(np.float64(x0), np.float64(y0))

    # eigenvalues of the quadratic form [[a, b/2], [b/2, c]]
    tr = c.a + c.c
    root = math.hypot(c.a - c.c, c.b)
    lam_small = (tr - root) / 2.0
    lam_big = (tr + root) / 2.0
    rhs = -float(f_center)
    sign = 1.0 if c.a > 0 or (c.a == 0 and c.c > 0) else -1.0
    if sign < 0:
        lam_small, lam_big, rhs = -lam_big, -lam_small, -rhs
    if rhs <= 0 or lam_small <= 0:
        raise NotAnEllipse("conic has no real ellipse points")

    a_semi = math.sqrt(rhs / lam_small)
    b_semi = math.sqrt(rhs / lam_big)
    if math.isclose(lam_small, lam_big, rel_tol=1e-12):
        theta = 0.0  # circle: orientation is arbitrary, use the canonical 0
    else:
        # 0.5*atan2(b, a-c) is the direction maximizing the (positive
        # definite) quadratic form, i.e. the minor axis; the major axis is
        # perpendicular to it
        theta = 0.5 * math.atan2(sign * c.b, sign * (c.a - c.c)) + math.pi / 2.0
    while theta >= math.pi / 2.0:
        theta -= math.pi
    while theta < -math.pi / 2.0:
        theta += math.pi
    return Ellipse(cx=float(x0), cy=float(y0), a=a_semi, b=b_semi, theta=theta)


def ef_detect(img: imaging.GrayImage, cfg: EfConfig = EfConfig()) -> Detection:
    """Fit the pupil ellipse at full resolution."""
    t0 = time.perf_counter()
    contour = extract_pupil_contour(
        img,
        threshold=cfg.threshold,
        se_radius=cfg.se_radius,
        canny_low=cfg.canny_low,
        canny_high=cfg.canny_high,
    )
    conic = fit_ellipse_direct(contour)
    ellipse = conic_to_ellipse(conic)
    return Detection(
        method="EF",
        cx=ellipse.cx,
        cy=ellipse.cy,
        shape=ellipse,
        score=float(len(contour)),
        elapsed=time.perf_counter() - t0,
    )
