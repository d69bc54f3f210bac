"""Render detections onto an image for visual inspection."""

from __future__ import annotations

import math

import numpy as np
from PIL import Image, ImageDraw

from .imaging import GrayImage
from .model import Circle, Detection, Ellipse

_COLORS = {
    "CHT": (230, 60, 60),
    "EF": (60, 200, 80),
    "IDO": (80, 120, 255),
    "RST": (255, 170, 40),
}
_CROSS = 8


def draw_detections(img: GrayImage, detections: list[Detection]) -> Image.Image:
    """RGB copy of the image with each successful detection drawn on top."""
    out = Image.fromarray(np.stack([img.pixels] * 3, axis=-1))
    draw = ImageDraw.Draw(out)
    for det in detections:
        if not det.ok:
            continue
        color = _COLORS.get(det.method, (255, 255, 255))
        draw.line([(det.cx - _CROSS, det.cy), (det.cx + _CROSS, det.cy)], fill=color, width=1)
        draw.line([(det.cx, det.cy - _CROSS), (det.cx, det.cy + _CROSS)], fill=color, width=1)
        if isinstance(det.shape, Circle):
            c = det.shape
            draw.ellipse([c.cx - c.r, c.cy - c.r, c.cx + c.r, c.cy + c.r], outline=color, width=1)
        elif isinstance(det.shape, Ellipse):
            draw.line(_ellipse_polyline(det.shape), fill=color, width=1)
    return out


def _ellipse_polyline(e: Ellipse, segments: int = 90) -> list[tuple[float, float]]:
    ct, st = math.cos(e.theta), math.sin(e.theta)
    pts = []
    for k in range(segments + 1):
        phi = 2.0 * math.pi * k / segments
        x = e.a * math.cos(phi)
        y = e.b * math.sin(phi)
        pts.append((e.cx + x * ct - y * st, e.cy + x * st + y * ct))
    return pts
