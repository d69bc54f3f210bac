"""Image containers, decoding, and the preprocessing primitives shared by
all four detectors: binarization, morphological closing, Canny edges,
connected components, Sobel gradients, Gaussian smoothing, 4x block
downsampling, and specular-spot removal.

All operations are pure: inputs are never mutated and returned containers
hold read-only arrays, so values are safe to share between threads.

Fixed conventions (chosen once so outputs are bit-reproducible):
  - luminance for color inputs: BT.601 weights, rounded to nearest
  - morphology borders: outside pixels are 0 for dilation, 1 for erosion
  - Sobel borders: the outer 1-pixel ring gets zero gradient
  - Gaussian smoothing: replicate border, kernel normalized to sum 1
  - downsampling: 4x4 block mean, rounded half away from zero
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from . import _kernels
from .errors import DecodeError, ImageTooSmall

LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_EIGHT = np.ones((3, 3), dtype=bool)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GrayImage:
    """8-bit grayscale image; ``pixels`` is a read-only (height, width) array."""

    pixels: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(self.pixels)
        if p.dtype != np.uint8:
            raise ValueError(f"GrayImage requires uint8 pixels, got {p.dtype}")
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError(f"GrayImage requires a non-empty 2-D array, got shape {p.shape}")
        if p is self.pixels and p.flags.writeable:
            p = p.copy()
        object.__setattr__(self, "pixels", _frozen(p))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def as_float(self) -> np.ndarray:
        return self.pixels.astype(np.float64)


@dataclass(frozen=True)
class BinaryImage:
    """Binary mask with values in {0, 1}; same layout rules as GrayImage."""

    pixels: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(self.pixels)
        if p.dtype != np.uint8:
            raise ValueError(f"BinaryImage requires uint8 pixels, got {p.dtype}")
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError(f"BinaryImage requires a non-empty 2-D array, got shape {p.shape}")
        if p.size and p.max() > 1:
            raise ValueError("BinaryImage values must be 0 or 1")
        if p is self.pixels and p.flags.writeable:
            p = p.copy()
        object.__setattr__(self, "pixels", _frozen(p))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class GradientField:
    """Per-pixel signed Sobel components plus the derived magnitude."""

    gx: np.ndarray
    gy: np.ndarray
    magnitude: np.ndarray

    def __post_init__(self):
        for name in ("gx", "gy", "magnitude"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, _frozen(arr))
        if not (self.gx.shape == self.gy.shape == self.magnitude.shape):
            raise ValueError("gradient component shapes disagree")

    @property
    def width(self) -> int:
        return self.gx.shape[1]

    @property
    def height(self) -> int:
        return self.gx.shape[0]


@dataclass(frozen=True)
class StructuringElement:
    """Disk-shaped structuring element of the given radius."""

    radius: int

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError(f"structuring element radius must be >= 1, got {self.radius}")

    @property
    def mask(self) -> np.ndarray:
        return _disk_mask(self.radius)


@lru_cache(maxsize=32)
def _disk_mask(radius: int) -> np.ndarray:
    span = np.arange(-radius, radius + 1)
    dy, dx = np.meshgrid(span, span, indexing="ij")
    return _frozen(dx * dx + dy * dy <= radius * radius)


@dataclass(frozen=True)
class Component:
    """One 8-connected component; pixel lists are in row-major order."""

    label: int
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xs", _frozen(np.ascontiguousarray(self.xs, dtype=np.int32)))
        object.__setattr__(self, "ys", _frozen(np.ascontiguousarray(self.ys, dtype=np.int32)))

    @property
    def size(self) -> int:
        return len(self.xs)

    @property
    def points(self) -> np.ndarray:
        """(N, 2) array of (x, y) coordinates."""
        return np.stack([self.xs, self.ys], axis=1)


# ---------------------------------------------------------------------------
# decoding / encoding


def decode(data: bytes) -> GrayImage:
    """Decode a PNG, JPEG, or binary PGM payload into a grayscale image.

    Color inputs are reduced to luminance with BT.601 weights, rounded to
    the nearest integer; 8-bit grayscale passes through unchanged.
    """
    if data[:2] == b"P5":
        return _decode_pgm(data)
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.uint8)
            else:
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                luma = rgb @ np.asarray(LUMA_WEIGHTS)
                arr = np.floor(luma + 0.5).astype(np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"cannot decode image: {exc}") from exc
    if arr.ndim != 2 or arr.size == 0:
        raise DecodeError("decoded image is empty")
    return GrayImage(arr)


def _decode_pgm(data: bytes) -> GrayImage:
    pos = 2
    fields: list[int] = []

    def skip_ws(p: int) -> int:
        while p < len(data):
            if data[p:p + 1].isspace():
                p += 1
            elif data[p] == ord("#"):
                while p < len(data) and data[p] != ord("\n"):
                    p += 1
            else:
                break
        return p

    while len(fields) < 3:
        pos = skip_ws(pos)
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise DecodeError(f"malformed PGM header near byte {start}")
        fields.append(int(token))
    width, height, maxval = fields
    if maxval != 255:
        raise DecodeError(f"only maxval 255 PGM is supported, got {maxval}")
    if width < 1 or height < 1:
        raise DecodeError("PGM dimensions must be positive")
    pos += 1  # single whitespace byte after maxval
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise DecodeError("truncated PGM raster")
    return GrayImage(np.frombuffer(raster, dtype=np.uint8).reshape(height, width))


def encode_pgm(img: GrayImage) -> bytes:
    """Serialize to binary PGM (P5, maxval 255). Lossless round-trip with decode."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


# ---------------------------------------------------------------------------
# point operations


def threshold_binarize(img: GrayImage, threshold: int) -> BinaryImage:
    """1 where intensity is strictly above the threshold, else 0."""
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {threshold}")
    return BinaryImage((img.pixels > threshold).astype(np.uint8))


# ---------------------------------------------------------------------------
# morphology


def close(img: BinaryImage, se: StructuringElement) -> BinaryImage:
    """Morphological closing (dilate, then erode) with a disk.

    Outside-image pixels count as 0 for the dilation and 1 for the
    erosion, so objects touching the border are never shrunk. Implemented
    with euclidean distance transforms, which is equivalent to the disk
    structuring element {dx^2 + dy^2 <= r^2} but much faster for large
    radii.
    """
    fg = img.pixels.astype(bool)
    r = se.radius
    if not fg.any():
        return BinaryImage(np.zeros_like(img.pixels))
    # dilation: pixels within distance r of the foreground
    dilated = ndimage.distance_transform_edt(~fg) <= r
    if dilated.all():
        # no background left: every disk fits (out-of-image counts as 1)
        eroded = dilated
    else:
        # erosion with outside==1: pixels farther than r from the background
        eroded = ndimage.distance_transform_edt(dilated) > r
    return BinaryImage(eroded.astype(np.uint8))


def dilate_reference(img: BinaryImage, se: StructuringElement) -> BinaryImage:
    """Direct structuring-element dilation; oracle for the fast path."""
    out = ndimage.binary_dilation(img.pixels.astype(bool), structure=se.mask, border_value=0)
    return BinaryImage(out.astype(np.uint8))


def erode_reference(img: BinaryImage, se: StructuringElement) -> BinaryImage:
    """Direct structuring-element erosion; oracle for the fast path."""
    out = ndimage.binary_erosion(img.pixels.astype(bool), structure=se.mask, border_value=1)
    return BinaryImage(out.astype(np.uint8))


# ---------------------------------------------------------------------------
# gradients and smoothing

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = _SOBEL_X.T


def _sobel_pair(field: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gx = ndimage.correlate(field, _SOBEL_X, mode="constant", cval=0.0)
    gy = ndimage.correlate(field, _SOBEL_Y, mode="constant", cval=0.0)
    for g in (gx, gy):
        g[0, :] = 0.0
        g[-1, :] = 0.0
        g[:, 0] = 0.0
        g[:, -1] = 0.0
    return gx, gy


def gradient(img: GrayImage) -> GradientField:
    """3x3 Sobel gradient field; the 1-pixel border is identically zero."""
    if img.width < 3 or img.height < 3:
        raise ImageTooSmall(f"gradient needs at least 3x3, got {img.width}x{img.height}")
    gx, gy = _sobel_pair(img.as_float())
    return GradientField(gx=gx, gy=gy, magnitude=np.hypot(gx, gy))


def gaussian_kernel1d(sigma: float, window: int) -> np.ndarray:
    """Sampled Gaussian of odd length ``window``, normalized to sum 1."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 1, got {window}")
    half = window // 2
    offs = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(offs * offs) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_smooth(field: np.ndarray, sigma: float, window: int) -> np.ndarray:
    """Separable Gaussian smoothing of a 2-D float field, replicate border."""
    k = gaussian_kernel1d(sigma, window)
    field = np.asarray(field, dtype=np.float64)
    out = ndimage.correlate1d(field, k, axis=0, mode="nearest")
    return ndimage.correlate1d(out, k, axis=1, mode="nearest")


# ---------------------------------------------------------------------------
# edges


def canny(img: GrayImage, low: float, high: float) -> BinaryImage:
    """Canny edge map: Gaussian blur (sigma 1.4, 5x5), Sobel gradients,
    non-maximum suppression, and double-threshold hysteresis (8-connected).
    """
    if not 0 <= low <= high <= 255:
        raise ValueError(f"need 0 <= low <= high <= 255, got low={low}, high={high}")
    blurred = gaussian_smooth(img.as_float(), sigma=1.4, window=5)
    gx, gy = _sobel_pair(blurred)
    mag = np.hypot(gx, gy)
    thin = _kernels.canny_nms(mag, gx, gy).astype(bool)
    strong = thin & (mag >= high) & (mag > 0)
    weak = thin & (mag >= low) & (mag > 0)
    edges = ndimage.binary_propagation(strong, structure=_EIGHT, mask=weak)
    return BinaryImage(edges.astype(np.uint8))


# ---------------------------------------------------------------------------
# components


def connected_components(img: BinaryImage) -> list[Component]:
    """8-connected components of the foreground, largest first.

    Ties in size break on the first pixel in row-major order. Components
    are relabeled 1..n in the reported order.
    """
    labels, n = ndimage.label(img.pixels, structure=_EIGHT)
    if n == 0:
        return []
    flat = labels.ravel()
    idx = np.flatnonzero(flat)
    lab = flat[idx]
    counts = np.bincount(lab, minlength=n + 1)
    first = np.full(n + 1, flat.size, dtype=np.int64)
    np.minimum.at(first, lab, idx)

    order = sorted(range(1, n + 1), key=lambda l: (-counts[l], first[l]))
    # group row-major pixel indices by label
    by_label = np.argsort(lab, kind="stable")
    bounds = np.searchsorted(lab[by_label], np.arange(1, n + 2))
    width = img.width
    out = []
    for rank, l in enumerate(order, start=1):
        sel = idx[by_label[bounds[l - 1]:bounds[l]]]
        out.append(Component(label=rank, xs=(sel % width).astype(np.int32), ys=(sel // width).astype(np.int32)))
    return out


# ---------------------------------------------------------------------------
# resampling and cleanup

DOWNSAMPLE_FACTOR = 4
DOWNSAMPLE_OFFSET = 1.5  # center of a 4x4 block in full-resolution pixels


def downsample4(img: GrayImage) -> GrayImage:
    """Reduce both dimensions by 4 using block averaging.

    Each output pixel is the rounded mean of its 4x4 block; trailing rows
    and columns that do not fill a block are dropped. Block averaging
    (rather than decimation) suppresses aliasing of thin structures.
    """
    f = DOWNSAMPLE_FACTOR
    if img.width < f or img.height < f:
        raise ImageTooSmall(f"downsample4 needs at least {f}x{f}, got {img.width}x{img.height}")
    h4, w4 = img.height // f, img.width // f
    block = img.pixels[: h4 * f, : w4 * f].astype(np.float64).reshape(h4, f, w4, f)
    means = block.mean(axis=(1, 3))
    return GrayImage(np.floor(means + 0.5).astype(np.uint8))


def to_full_res(x: float) -> float:
    """Map a downsampled coordinate back to full resolution (block center)."""
    return x * DOWNSAMPLE_FACTOR + DOWNSAMPLE_OFFSET


def remove_light_spots(img: GrayImage, bright_threshold: int = 200) -> GrayImage:
    """Fill saturated specular spots with the mean of their surroundings.

    Pixels above ``bright_threshold`` form 8-connected spot components;
    each spot is replaced by the rounded mean intensity of its 1-pixel
    outer boundary ring (bright pixels excluded from the ring). All means
    are taken from the original image, so the result does not depend on
    spot processing order. A spot with an empty ring (e.g. the whole
    image) is left untouched.
    """
    if not 0 <= bright_threshold <= 255:
        raise ValueError(f"bright threshold must be in [0, 255], got {bright_threshold}")
    bright = img.pixels > bright_threshold
    if not bright.any():
        return img
    labels, n = ndimage.label(bright, structure=_EIGHT)
    out = img.pixels.copy()
    h, w = out.shape
    for i, sl in enumerate(ndimage.find_objects(labels), start=1):
        y0 = max(sl[0].start - 1, 0)
        y1 = min(sl[0].stop + 1, h)
        x0 = max(sl[1].start - 1, 0)
        x1 = min(sl[1].stop + 1, w)
        window = (slice(y0, y1), slice(x0, x1))
        spot = labels[window] == i
        ring = ndimage.binary_dilation(spot, structure=_EIGHT) & ~bright[window]
        if not ring.any():
            continue
        fill = math.floor(img.pixels[window][ring].mean() + 0.5)
        out[window][spot] = fill
    return GrayImage(out)
