"""Pupil-center detection toolkit.

Four classical detectors (circular Hough transform, direct least-squares
ellipse fitting, the integro-differential operator, and the radial
symmetry transform) behind one API, plus a ground-truth synthesizer, a
benchmark harness with accuracy/robustness/timing reports, and a local
annotation service.
"""

from ._kernels import BACKEND
from .cht import ChtConfig, cht_detect
from .ef import EfConfig, ef_detect
from .evaluation import (
    CATEGORIES,
    BenchReport,
    DatasetEntry,
    DatasetManifest,
    detect_with_method,
    hit_rate,
    is_hit,
    load_manifest,
    relative_error,
    render_report,
    run_benchmark,
    save_manifest,
)
from .ido import IdoConfig, ido_detect
from .imaging import BinaryImage, GrayImage, decode, encode_pgm
from .model import METHODS, Annotation, Circle, Detection, Ellipse
from .rst import RstConfig, rst_detect
from .synth import generate_corpus, synth_eye

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "METHODS",
    "CATEGORIES",
    "Annotation",
    "BenchReport",
    "BinaryImage",
    "ChtConfig",
    "Circle",
    "DatasetEntry",
    "DatasetManifest",
    "Detection",
    "EfConfig",
    "Ellipse",
    "GrayImage",
    "IdoConfig",
    "RstConfig",
    "cht_detect",
    "decode",
    "detect_with_method",
    "ef_detect",
    "encode_pgm",
    "generate_corpus",
    "hit_rate",
    "ido_detect",
    "is_hit",
    "load_manifest",
    "relative_error",
    "render_report",
    "rst_detect",
    "run_benchmark",
    "save_manifest",
    "synth_eye",
    "__version__",
]
