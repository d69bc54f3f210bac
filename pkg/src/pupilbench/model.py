"""Result types shared by the four detectors."""

from __future__ import annotations

import math
from dataclasses import dataclass

METHODS = ("CHT", "EF", "IDO", "RST")


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"circle radius must be positive, got {self.r}")


@dataclass(frozen=True)
class Ellipse:
    """Geometric ellipse: center, semi-axes a >= b, orientation of the major axis.

    theta is measured in radians from the +x axis and normalized to
    [-pi/2, pi/2).
    """

    cx: float
    cy: float
    a: float
    b: float
    theta: float

    def __post_init__(self):
        if not (self.a >= self.b > 0):
            raise ValueError(f"semi-axes must satisfy a >= b > 0, got a={self.a}, b={self.b}")
        if not (-math.pi / 2 <= self.theta < math.pi / 2):
            raise ValueError(f"theta must lie in [-pi/2, pi/2), got {self.theta}")


@dataclass(frozen=True)
class Annotation:
    """Ground-truth or human-annotated pupil center and radius."""

    cx: float
    cy: float
    r: float
    annotator: str = ""
    timestamp: int = 0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"annotation radius must be positive, got {self.r}")

    def to_json_dict(self) -> dict:
        return {
            "cx": self.cx,
            "cy": self.cy,
            "r": self.r,
            "annotator": self.annotator,
            "timestamp": self.timestamp,
        }


@dataclass(frozen=True)
class Detection:
    """Outcome of one detector on one image.

    A failed detection carries the error message and NaN coordinates; it
    still records the elapsed wall-clock time.
    """

    method: str
    cx: float
    cy: float
    shape: Circle | Ellipse | None
    score: float
    elapsed: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_json_dict(self) -> dict:
        if not self.ok:
            return {"method": self.method, "error": self.error, "elapsed_s": self.elapsed}
        if isinstance(self.shape, Circle):
            shape = {"type": "circle", "cx": self.shape.cx, "cy": self.shape.cy, "r": self.shape.r}
        elif isinstance(self.shape, Ellipse):
            shape = {
                "type": "ellipse",
                "cx": self.shape.cx,
                "cy": self.shape.cy,
                "a": self.shape.a,
                "b": self.shape.b,
                "theta": self.shape.theta,
            }
        else:
            shape = None
        return {
            "method": self.method,
            "cx": self.cx,
            "cy": self.cy,
            "shape": shape,
            "score": self.score,
            "elapsed_s": self.elapsed,
        }


def failed_detection(method: str, error: str, elapsed: float) -> Detection:
    return Detection(
        method=method,
        cx=math.nan,
        cy=math.nan,
        shape=None,
        score=math.nan,
        elapsed=elapsed,
        error=error,
    )
