"""Kernel backend selection.

The four hot kernels (edge thinning, Hough voting, radial-symmetry
accumulation, circular contour sampling) exist twice: a compiled
extension (``_kernels_cy``) and a numpy fallback (``_kernels_py``). The
compiled backend is preferred when built; ``PUPILBENCH_BACKEND`` forces
a specific one (``auto`` | ``compiled`` | ``python``).
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py

try:
    from . import _kernels_cy
except ImportError:
    _kernels_cy = None


def available_backends() -> list[str]:
    names = ["python"]
    if _kernels_cy is not None:
        names.insert(0, "compiled")
    return names


def get_backend(name: str) -> ModuleType:
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _kernels_cy is None:
            raise ImportError("compiled kernels are not built; run `python setup.py build_ext --inplace`")
        return _kernels_cy
    raise ValueError(f"unknown kernel backend {name!r} (expected 'compiled' or 'python')")


def _select() -> ModuleType:
    requested = os.environ.get("PUPILBENCH_BACKEND", "auto").strip().lower() or "auto"
    if requested == "auto":
        return _kernels_cy if _kernels_cy is not None else _kernels_py
    return get_backend(requested)


_active = _select()

BACKEND: str = _active.NAME
canny_nms = _active.canny_nms
hough_vote = _active.hough_vote
rst_accumulate = _active.rst_accumulate
ido_means = _active.ido_means
