#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times each hot kernel on realistic inputs (a synthetic eye at working
resolution) and the four full detectors under each backend. Run with:

    python3 benchmarks/bench_kernels.py [--repeats 30]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from pupilbench import _kernels, imaging, synth
from pupilbench.cht import _offset_table
from pupilbench.evaluation import detect_with_method
from pupilbench.ido import prune_candidates
from pupilbench.model import METHODS


def timeit(fn, repeats: int) -> float:
    fn()  # warm up
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def kernel_cases():
    """(name, callable-factory) pairs; the factory takes a backend module."""
    img, _ = synth.synth_eye(seed=0, noise_sigma=1.5)
    small = imaging.downsample4(img)
    grad = imaging.gradient(small)
    full_grad = imaging.gradient(img)

    edges = imaging.canny(small, 40, 100)
    ys, xs = np.nonzero(edges.pixels)
    ys32, xs32 = ys.astype(np.int32), xs.astype(np.int32)
    starts, off_dy, off_dx = _offset_table(5, 25)

    cands = prune_candidates(imaging.remove_light_spots(small, 200), 25)
    radii = np.arange(5, 26, dtype=np.int32)
    small_f = small.as_float()
    thresh = 0.05 * float(grad.magnitude.max())

    return [
        (
            "canny_nms (640x480)",
            lambda mod: mod.canny_nms(full_grad.magnitude, full_grad.gx, full_grad.gy),
        ),
        (
            "hough_vote (r 5..25)",
            lambda mod: mod.hough_vote(
                ys32, xs32, starts, off_dy, off_dx, small.height, small.width
            ),
        ),
        (
            "rst_accumulate (n=15)",
            lambda mod: mod.rst_accumulate(grad.gx, grad.gy, grad.magnitude, 15, thresh),
        ),
        (
            "ido_means (all radii)",
            lambda mod: mod.ido_means(small_f, cands.ys, cands.xs, radii),
        ),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=30)
    args = parser.parse_args()

    backends = _kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernels not built; run `python3 setup.py build_ext --inplace` first")

    print(f"backends: {', '.join(backends)}   (active: {_kernels.BACKEND})\n")
    print(f"{'kernel':26s} " + " ".join(f"{b:>12s}" for b in backends) + "   speedup")
    results = {}
    for name, factory in kernel_cases():
        row = {}
        for backend in backends:
            mod = _kernels.get_backend(backend)
            row[backend] = timeit(lambda: factory(mod), args.repeats)
        results[name] = row
        cells = " ".join(f"{row[b] * 1e3:10.3f} ms" for b in backends)
        speed = (
            f"{row['python'] / row['compiled']:9.1f}x"
            if "compiled" in row and row["compiled"] > 0
            else "        -"
        )
        print(f"{name:26s} {cells} {speed}")

    print(f"\n{'detector':26s} " + " ".join(f"{b:>12s}" for b in backends))
    img, _ = synth.synth_eye(seed=1, noise_sigma=1.5)
    for method in METHODS:
        row = {}
        for backend in backends:
            mod = _kernels.get_backend(backend)
            saved = {f: getattr(_kernels, f) for f in
                     ("canny_nms", "hough_vote", "rst_accumulate", "ido_means")}
            try:
                for f in saved:
                    setattr(_kernels, f, getattr(mod, f))
                row[backend] = timeit(lambda: detect_with_method(method, img), args.repeats)
            finally:
                for f, fn in saved.items():
                    setattr(_kernels, f, fn)
        cells = " ".join(f"{row[b] * 1e3:10.3f} ms" for b in backends)
        print(f"{method:26s} {cells}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
