"""Radial symmetry transform pupil detector, dark-regions mode.

Every pixel with a meaningful gradient votes once per radius at the pixel
n steps against its gradient direction; for dark blobs those votes
converge on the blob center. Per radius, the signed orientation and
magnitude projections are normalized by their maxima, combined with the
radial-strictness power law, and blurred with a radius-scaled Gaussian.
The final map averages the per-radius contributions over the whole
radius set, and the extremum of largest magnitude marks the pupil
center.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels, imaging
from .errors import FlatImage, ZeroGradient
from .model import Circle, Detection


@dataclass(frozen=True)
class RstConfig:
    r_min: int = 5
    r_max: int = 25
    alpha: float = 2.0
    grad_floor: float = 0.05  # ignore gradients below this fraction of the max

    def __post_init__(self):
        if not 1 <= self.r_min <= self.r_max:
            raise ValueError(f"need 1 <= r_min <= r_max, got {self.r_min}..{self.r_max}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def radii(self) -> range:
        return range(self.r_min, self.r_max + 1)


@dataclass(frozen=True)
class RstProjection:
    """Signed orientation counts and gradient-magnitude sums for one radius.

    In dark-regions mode both images are non-positive everywhere.
    """

    n: int
    orientation: np.ndarray
    magnitude: np.ndarray

    def __post_init__(self):
        for name in ("orientation", "magnitude"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class SymmetryMap:
    """Averaged symmetry map plus the per-radius contributions it averages."""

    values: np.ndarray
    contributions: tuple[np.ndarray, ...]
    radii: tuple[int, ...]

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


def negatively_affected(p: tuple[int, int], g: tuple[float, float], n: int) -> tuple[int, int]:
    """Pixel n steps against the gradient direction from p.

    Components round half away from zero. The result may fall outside the
    image; callers skip those votes.
    """
    gx, gy = g
    norm = math.hypot(gx, gy)
    if norm == 0.0:
        raise ZeroGradient("cannot project along a zero gradient")
    scale = n / norm

    def round_away(v: float) -> int:
        r = math.floor(abs(v) + 0.5)
        return -r if v < 0 else r

    return p[0] - round_away(gx * scale), p[1] - round_away(gy * scale)


def accumulate_projections(grad: imaging.GradientField, n: int, grad_floor: float) -> RstProjection:
    """Dark-mode projection images for radius n.

    Pixels with gradient magnitude above grad_floor times the field
    maximum vote; out-of-image targets are skipped.
    """
    if n < 1:
        raise ValueError(f"radius must be >= 1, got {n}")
    thresh = grad_floor * float(grad.magnitude.max())
    orient, magsum = _kernels.rst_accumulate(grad.gx, grad.gy, grad.magnitude, n, thresh)
    return RstProjection(n=n, orientation=orient, magnitude=magsum)


def gaussian_window(n: int) -> int:
    """Blur window for radius n: ceil(n/2), bumped to odd for a center tap."""
    w = math.ceil(n / 2)
    return w + 1 if w % 2 == 0 else w


def saturation_limit(n: int) -> float:
    """Orientation-count normalizer: 8 at radius 1, 9.9 elsewhere.

    A constant limit (rather than the per-radius maximum) keeps the
    absolute vote-count advantage of a true symmetry center comparable
    across radii; normalizing each radius plane by its own maximum would
    amplify structureless planes to full scale and let thin accidental
    vote rings at small radii outscore the real center.
    """
    return 8.0 if n == 1 else 9.9


def symmetry_contribution(proj: RstProjection, alpha: float = 2.0) -> np.ndarray:
    """Saturated, strictness-weighted, Gaussian-blurred contribution S_n.

    Orientation counts saturate at the radius normalizer before the
    strictness power is applied; magnitudes keep their absolute scale so
    radius planes stay mutually comparable. The blur uses
    sigma = 0.1 * n with the radius-scaled window.
    """
    k = saturation_limit(proj.n)
    o = np.abs(proj.orientation)
    if not o.any() or not proj.magnitude.any():
        return np.zeros_like(proj.orientation)
    f = (proj.magnitude / k) * (np.minimum(o, k) / k) ** alpha
    return imaging.gaussian_smooth(f, sigma=0.1 * proj.n, window=gaussian_window(proj.n))


def symmetry_map(img: imaging.GrayImage, cfg: RstConfig = RstConfig()) -> SymmetryMap:
    """Full transform of the downsampled image; raises FlatImage when the
    gradient field is identically zero."""
    small = imaging.downsample4(img)
    grad = imaging.gradient(small)
    if float(grad.magnitude.max()) == 0.0:
        raise FlatImage("gradient field is identically zero")
    contributions = []
    total = np.zeros_like(grad.magnitude)
    for n in cfg.radii:
        proj = accumulate_projections(grad, n, cfg.grad_floor)
        s_n = symmetry_contribution(proj, cfg.alpha)
        contributions.append(s_n)
        total = total + s_n
    values = total / len(contributions)
    return SymmetryMap(values=values, contributions=tuple(contributions), radii=tuple(cfg.radii))


def rst_detect(img: imaging.GrayImage, cfg: RstConfig = RstConfig()) -> Detection:
    """Detect the pupil center; raises FlatImage on gradient-free input."""
    t0 = time.perf_counter()
    sym = symmetry_map(img, cfg)
    magnitude = np.abs(sym.values)
    best = int(np.argmax(magnitude))  # first max in row-major order: (y, x) tie rule
    y, x = np.unravel_index(best, magnitude.shape)
    best_n = sym.radii[
        int(np.argmax([abs(s[y, x]) for s in sym.contributions]))
    ]
    cx = imaging.to_full_res(float(x))
    cy = imaging.to_full_res(float(y))
    return Detection(
        method="RST",
        cx=cx,
        cy=cy,
        shape=Circle(cx=cx, cy=cy, r=float(best_n) * imaging.DOWNSAMPLE_FACTOR),
        score=float(magnitude[y, x]),
        elapsed=time.perf_counter() - t0,
    )
