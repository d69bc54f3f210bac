"""Shared fixtures: synthetic images, the frozen acceptance corpus, and a
terminal summary that prints one pass/fail line per acceptance criterion."""

from __future__ import annotations

import numpy as np
import pytest

from pupilbench import evaluation, synth
from pupilbench.imaging import GrayImage


@pytest.fixture(scope="session")
def corpus_manifest(tmp_path_factory):
    """The frozen 80-image acceptance corpus (count=80, seed=1)."""
    out = tmp_path_factory.mktemp("corpus")
    manifest_path = synth.generate_corpus(out, count=80, seed=1)
    return evaluation.load_manifest(manifest_path)


@pytest.fixture(scope="session")
def corpus_report(corpus_manifest):
    """One benchmark pass over the frozen corpus, shared across tests."""
    return evaluation.run_benchmark(corpus_manifest, repeat=1)


@pytest.fixture()
def simple_eye():
    img, ann = synth.synth_eye(
        center=(321.5, 241.5), pupil_radius=40.0, iris_radius=130.0, seed=3
    )
    return img, ann


def render_disk(width: int, height: int, cx: float, cy: float, r: float, *,
                dark: int = 0, bright: int = 255, antialias: bool = False) -> GrayImage:
    """Hard or 1px-antialiased dark disk on a bright background."""
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    dist = np.hypot(xs - cx, ys - cy)
    if antialias:
        alpha = np.clip(r - dist + 0.5, 0.0, 1.0)
        vals = bright * (1 - alpha) + dark * alpha
        return GrayImage(np.floor(vals + 0.5).astype(np.uint8))
    return GrayImage(np.where(dist <= r, dark, bright).astype(np.uint8))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one line per acceptance criterion after the run."""
    lines = []
    for status in ("passed", "failed", "error", "xfailed", "xpassed", "skipped"):
        for rep in terminalreporter.stats.get(status, ""):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            if getattr(rep, "when", "call") != "call" and status == "passed":
                continue
            name = nodeid.split("::")[-1]
            verdict = {
                "passed": "PASS",
                "failed": "FAIL",
                "error": "ERROR",
                "xfailed": "XFAIL (documented)",
                "xpassed": "XPASS",
                "skipped": "SKIP",
            }[status]
            lines.append((name, verdict))
    if not lines:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, verdict in sorted(set(lines)):
        terminalreporter.write_line(f"{verdict:18s} {name}")
