"""Metrics, manifest handling, benchmark aggregation, report rendering,
and the synthetic ground-truth generator."""

import json
import math

import numpy as np
import pytest

from pupilbench import evaluation, synth
from pupilbench.errors import EmptySet, InvalidGeometry, ManifestError
from pupilbench.evaluation import (
    CATEGORIES,
    DatasetEntry,
    DatasetManifest,
    apportion,
    average_robustness,
    build_report,
    hit_rate,
    is_hit,
    load_manifest,
    relative_error,
    render_report,
    run_benchmark,
    save_manifest,
    strip_timing,
)
from pupilbench.imaging import encode_pgm
from pupilbench.model import Annotation, Detection, failed_detection


def det_at(x, y, method="RST", elapsed=0.01):
    return Detection(method=method, cx=x, cy=y, shape=None, score=1.0, elapsed=elapsed)


class TestRelativeError:
    def test_exact_center_is_zero(self):
        ann = Annotation(cx=10, cy=20, r=5)
        assert relative_error(det_at(10, 20), ann) == 0.0

    def test_quarter_radius(self):
        ann = Annotation(cx=0, cy=0, r=40)
        assert relative_error(det_at(10, 0), ann) == pytest.approx(0.25)

    def test_errored_detection_is_infinite(self):
        ann = Annotation(cx=0, cy=0, r=10)
        failed = failed_detection("EF", "NoContour: empty", 0.001)
        assert relative_error(failed, ann) == math.inf


class TestIsHit:
    def test_zero_hits(self):
        assert is_hit(0.0)

    def test_boundary_inclusive(self):
        assert is_hit(0.25)

    def test_just_over_misses(self):
        assert not is_hit(0.25 + 1e-7)

    def test_infinite_misses(self):
        assert not is_hit(math.inf)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            is_hit(-0.1)


class TestHitRate:
    def test_published_subset_rate(self):
        ann = Annotation(cx=0, cy=0, r=10)
        results = [(det_at(0, 0), ann)] * 394 + [(det_at(100, 0), ann)] * 6
        assert hit_rate(results) == 98.50

    def test_pooled_rate_rounding(self):
        ann = Annotation(cx=0, cy=0, r=10)
        results = [(det_at(0, 0), ann)] * 757 + [(det_at(100, 0), ann)] * 43
        assert hit_rate(results) == 94.62  # 94.625 reported to 2 dp

    def test_all_misses(self):
        ann = Annotation(cx=0, cy=0, r=10)
        assert hit_rate([(det_at(50, 50), ann)] * 10) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(EmptySet):
            hit_rate([])

    def test_permutation_invariant(self):
        rng = np.random.default_rng(1)
        ann = Annotation(cx=0, cy=0, r=10)
        results = [(det_at(float(rng.uniform(0, 6)), 0), ann) for _ in range(25)]
        shuffled = [results[i] for i in rng.permutation(25)]
        assert hit_rate(results) == hit_rate(shuffled)


class TestAverageRobustness:
    def test_reference_table_values(self):
        assert average_robustness([76.53, 58.08, 51.64, 26]) == 53.06
        assert average_robustness([87.31, 65.44, 47.25, 68]) == 67.00
        assert average_robustness([91.54, 72.05, 75.82, 92]) == 82.85

    def test_empty_rejected(self):
        with pytest.raises(EmptySet):
            average_robustness([])


class TestApportion:
    def test_default_ratio_for_80(self):
        assert apportion(80, evaluation.DEFAULT_PROPORTIONS) == [47, 14, 9, 10]

    def test_sums_to_count(self):
        for count in (1, 7, 33, 799, 800):
            assert sum(apportion(count, evaluation.DEFAULT_PROPORTIONS)) == count

    def test_exact_split(self):
        assert apportion(800, evaluation.DEFAULT_PROPORTIONS) == [473, 136, 91, 100]


class TestManifest:
    def make_manifest(self, tmp_path, n=2):
        entries = []
        for i in range(n):
            img, ann = synth.synth_eye(seed=i)
            name = f"img_{i}.pgm"
            (tmp_path / name).write_bytes(encode_pgm(img))
            entries.append(DatasetEntry(path=name, category="clear", annotation=ann))
        manifest = DatasetManifest(root=tmp_path, entries=tuple(entries))
        save_manifest(manifest, tmp_path / "manifest.json")
        return manifest

    def test_round_trip(self, tmp_path):
        manifest = self.make_manifest(tmp_path)
        loaded = load_manifest(tmp_path / "manifest.json")
        assert loaded.entries == manifest.entries

    def test_bad_category_rejected(self):
        with pytest.raises(ManifestError):
            DatasetEntry(path="x.pgm", category="foggy", annotation=Annotation(cx=1, cy=1, r=2))

    def test_missing_file_rejected(self):
        with pytest.raises(ManifestError):
            load_manifest("/nonexistent/manifest.json")

    def test_bad_version_rejected(self, tmp_path):
        p = tmp_path / "manifest.json"
        p.write_text(json.dumps({"version": 2, "images": []}))
        with pytest.raises(ManifestError):
            load_manifest(p)

    def test_bad_annotation_rejected(self, tmp_path):
        p = tmp_path / "manifest.json"
        p.write_text(json.dumps({
            "version": 1,
            "images": [{"path": "a.pgm", "category": "clear",
                        "annotation": {"cx": 1.0, "cy": 1.0, "r": -3.0}}],
        }))
        with pytest.raises(ManifestError):
            load_manifest(p)


class TestRunBenchmark:
    def test_small_corpus_all_methods(self, tmp_path):
        manifest_path = synth.generate_corpus(tmp_path, count=6, seed=4)
        report = run_benchmark(load_manifest(manifest_path), repeat=1)
        assert set(report.methods) == {"CHT", "EF", "IDO", "RST"}
        for summary in report.summaries:
            assert 0 <= summary.rate <= 100
        for t in report.timing:
            assert t.min_s <= t.median_s <= t.max_s

    def test_empty_manifest_rejected(self, tmp_path):
        manifest = DatasetManifest(root=tmp_path, entries=())
        with pytest.raises(ManifestError):
            run_benchmark(manifest)

    def test_missing_image_rejected(self, tmp_path):
        entry = DatasetEntry(path="ghost.pgm", category="clear",
                             annotation=Annotation(cx=10, cy=10, r=5))
        with pytest.raises(ManifestError):
            run_benchmark(DatasetManifest(root=tmp_path, entries=(entry,)))

    def test_annotation_out_of_bounds_rejected(self, tmp_path):
        img, _ = synth.synth_eye(seed=1)
        (tmp_path / "img.pgm").write_bytes(encode_pgm(img))
        entry = DatasetEntry(path="img.pgm", category="clear",
                             annotation=Annotation(cx=9999.0, cy=10.0, r=5.0))
        with pytest.raises(ManifestError):
            run_benchmark(DatasetManifest(root=tmp_path, entries=(entry,)))

    def test_method_subset(self, tmp_path):
        manifest_path = synth.generate_corpus(tmp_path, count=4, seed=9)
        report = run_benchmark(load_manifest(manifest_path), methods=["rst", "ef"], repeat=1)
        assert report.methods == ("RST", "EF")

    def test_errored_detection_counts_as_miss(self, tmp_path):
        # flat image: every detector fails, every cell is a miss
        from pupilbench.imaging import GrayImage
        flat = GrayImage(np.full((480, 640), 128, dtype=np.uint8))
        (tmp_path / "flat.pgm").write_bytes(encode_pgm(flat))
        entry = DatasetEntry(path="flat.pgm", category="clear",
                             annotation=Annotation(cx=320, cy=240, r=40))
        report = run_benchmark(DatasetManifest(root=tmp_path, entries=(entry,)), repeat=1)
        for s in report.summaries:
            assert s.rate == 0.0


class TestReportRendering:
    def fixed_report(self):
        ann = Annotation(cx=100, cy=100, r=20)
        entry = DatasetEntry(path="a.pgm", category="clear", annotation=ann)
        results = {
            "RST": [(entry, det_at(100, 100, "RST", elapsed=0.5))],
        }
        return build_report(["RST"], ["clear"], results)

    def test_single_cell_report(self):
        report = self.fixed_report()
        assert report.cell("RST", "clear").hits == 1
        assert report.summary("RST").rate == 100.0
        md = render_report(report, "markdown").decode()
        assert "| RST | 1/1 (100.00%) | 1/1 (100.00%) |" in md

    def test_json_markdown_agree(self):
        report = self.fixed_report()
        d = json.loads(render_report(report, "json"))
        md = render_report(report, "markdown").decode()
        for cell in d["cells"]:
            assert f"({cell['rate']:.2f}%)" in md

    def test_json_schema_fields(self):
        d = json.loads(render_report(self.fixed_report(), "json"))
        assert d["version"] == 1
        assert set(d.keys()) == {"version", "methods", "categories", "cells", "global", "timing"}
        assert set(d["cells"][0]) == {"method", "category", "hits", "total", "rate"}
        assert set(d["global"][0]) == {"method", "rate", "avg_robustness"}
        assert set(d["timing"][0]) == {"method", "mean_s", "median_s", "min_s", "max_s"}

    def test_byte_stable(self):
        a = render_report(self.fixed_report(), "json")
        b = render_report(self.fixed_report(), "json")
        assert a == b

    def test_strip_timing(self):
        d = json.loads(render_report(self.fixed_report(), "json"))
        assert "timing" not in strip_timing(d)

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            render_report(self.fixed_report(), "xml")


class TestSynthEye:
    def test_deterministic(self):
        a, _ = synth.synth_eye(seed=7, noise_sigma=2.0, stroke_count=3)
        b, _ = synth.synth_eye(seed=7, noise_sigma=2.0, stroke_count=3)
        assert np.array_equal(a.pixels, b.pixels)

    def test_different_seeds_differ(self):
        a, _ = synth.synth_eye(seed=7, noise_sigma=2.0)
        b, _ = synth.synth_eye(seed=8, noise_sigma=2.0)
        assert not np.array_equal(a.pixels, b.pixels)

    def test_eyelid_covers_requested_fraction(self):
        fraction = 0.4
        base, ann = synth.synth_eye(seed=0)
        lidded, _ = synth.synth_eye(seed=0, eyelid_fraction=fraction)
        ys, xs = np.mgrid[0:480, 0:640]
        pupil = np.hypot(xs - ann.cx, ys - ann.cy) <= ann.r - 1
        covered = pupil & (lidded.pixels.astype(int) - base.pixels.astype(int) > 100)
        got = covered.sum() / pupil.sum()
        assert got == pytest.approx(fraction, abs=0.04)

    def test_pupil_larger_than_iris_rejected(self):
        with pytest.raises(InvalidGeometry):
            synth.synth_eye(pupil_radius=100.0, iris_radius=90.0)

    def test_iris_outside_image_rejected(self):
        with pytest.raises(InvalidGeometry):
            synth.synth_eye(center=(30.0, 240.0), iris_radius=90.0)

    def test_eyelid_fraction_range(self):
        with pytest.raises(InvalidGeometry):
            synth.synth_eye(eyelid_fraction=0.95)

    def test_annotation_matches_intensity_centroid(self):
        img, ann = synth.synth_eye(center=(320.25, 240.75), pupil_radius=40.0,
                                   iris_radius=120.0, seed=2)
        ys, xs = np.mgrid[0:480, 0:640]
        near = np.hypot(xs - ann.cx, ys - ann.cy) <= ann.r + 6
        w = np.clip(100.0 - img.pixels.astype(float), 0, None) * near
        cx = (w * xs).sum() / w.sum()
        cy = (w * ys).sum() / w.sum()
        assert math.hypot(cx - ann.cx, cy - ann.cy) <= 0.5

    def test_glints_saturate(self):
        img, ann = synth.synth_eye(seed=3, glint_count=2)
        ys, xs = np.mgrid[0:480, 0:640]
        pupil = np.hypot(xs - ann.cx, ys - ann.cy) <= ann.r
        assert (img.pixels[pupil] == 255).any()

    def test_annotation_radius_for_ellipse(self):
        _, ann = synth.synth_eye(pupil_axes=(50.0, 30.0, 0.3), iris_radius=120.0)
        assert ann.r == pytest.approx(40.0)


class TestGenerateCorpus:
    def test_deterministic_byte_tree(self, tmp_path):
        p1 = synth.generate_corpus(tmp_path / "a", count=12, seed=5)
        p2 = synth.generate_corpus(tmp_path / "b", count=12, seed=5)
        files1 = sorted(f.name for f in (tmp_path / "a").iterdir())
        files2 = sorted(f.name for f in (tmp_path / "b").iterdir())
        assert files1 == files2
        for name in files1:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_category_counts(self, tmp_path):
        manifest = load_manifest(synth.generate_corpus(tmp_path, count=80, seed=2))
        counts = {c: sum(1 for e in manifest.entries if e.category == c) for c in CATEGORIES}
        assert counts == {"clear": 47, "hair_eyelashes": 14, "eyelid": 9, "glasses_reflections": 10}

    def test_count_must_be_positive(self, tmp_path):
        with pytest.raises(ValueError):
            synth.generate_corpus(tmp_path, count=0, seed=1)


class TestGoldenReport:
    """The frozen mini-benchmark renders byte-identically; hits are far
    from the 25% boundary so the golden is backend independent."""

    @staticmethod
    def build():
        import dataclasses
        import tempfile
        from pathlib import Path

        d = Path(tempfile.mkdtemp())
        mp = synth.generate_corpus(d / "g", count=8, seed=13)
        rep = run_benchmark(load_manifest(mp), repeat=1)
        timing = tuple(
            dataclasses.replace(t, mean_s=0.0, median_s=0.0, min_s=0.0, max_s=0.0)
            for t in rep.timing
        )
        return dataclasses.replace(rep, timing=timing)

    def test_markdown_matches_golden(self, request):
        golden = request.path.parent / "data" / "golden_report.md"
        assert render_report(self.build(), "markdown") == golden.read_bytes()

    def test_json_matches_golden(self, request):
        golden = request.path.parent / "data" / "golden_report.json"
        assert render_report(self.build(), "json") == golden.read_bytes()
