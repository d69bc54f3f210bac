"""Annotation server: API round-trips, validation, persistence."""

import json
import threading
import urllib.error
import urllib.request

import pytest

from pupilbench import synth
from pupilbench.annotate import AnnotationServer
from pupilbench.evaluation import load_manifest
from pupilbench.imaging import encode_pgm


@pytest.fixture()
def image_dir(tmp_path):
    for i in range(3):
        img, _ = synth.synth_eye(seed=30 + i)
        (tmp_path / f"img_{i}.pgm").write_bytes(encode_pgm(img))
    return tmp_path


@pytest.fixture()
def server(image_dir):
    srv = AnnotationServer(image_dir, port=0)
    srv.start_background()
    yield srv
    srv.stop()


def api(server, path, method="GET", payload=None):
    url = f"http://127.0.0.1:{server.port}{path}"
    data = json.dumps(payload).encode() if payload is not None else None
    req = urllib.request.Request(url, data=data, method=method)
    try:
        with urllib.request.urlopen(req, timeout=5) as resp:
            return resp.status, json.loads(resp.read() or b"null")
    except urllib.error.HTTPError as exc:
        return exc.code, json.loads(exc.read() or b"null")


class TestImagesApi:
    def test_list_images(self, server):
        status, items = api(server, "/api/images")
        assert status == 200
        assert [i["id"] for i in items] == ["img_0.pgm", "img_1.pgm", "img_2.pgm"]
        assert all(i["width"] == 640 and i["height"] == 480 for i in items)
        assert all(not i["annotated"] for i in items)

    def test_get_image_bytes(self, server, image_dir):
        url = f"http://127.0.0.1:{server.port}/api/image/img_0.pgm"
        with urllib.request.urlopen(url, timeout=5) as resp:
            assert resp.status == 200
            assert resp.read() == (image_dir / "img_0.pgm").read_bytes()

    def test_unknown_image_404(self, server):
        status, _ = api(server, "/api/image/ghost.pgm")
        assert status == 404

    def test_traversal_rejected(self, server):
        status, _ = api(server, "/api/image/..%2Fmanifest.json")
        assert status == 404


class TestAnnotationApi:
    def test_put_get_round_trip(self, server):
        ann = {"cx": 320.5, "cy": 240.5, "r": 41.0, "annotator": "tester", "timestamp": 123}
        status, saved = api(server, "/api/annotation/img_0.pgm", "PUT", ann)
        assert status == 200
        status, got = api(server, "/api/annotation/img_0.pgm")
        assert status == 200
        assert got == saved
        assert got["cx"] == 320.5 and got["r"] == 41.0

    def test_unannotated_404(self, server):
        status, _ = api(server, "/api/annotation/img_2.pgm")
        assert status == 404

    def test_negative_radius_422(self, server):
        status, body = api(server, "/api/annotation/img_0.pgm", "PUT",
                           {"cx": 10, "cy": 10, "r": -3})
        assert status == 422
        assert "radius" in body["error"]

    def test_center_out_of_bounds_422(self, server):
        status, _ = api(server, "/api/annotation/img_0.pgm", "PUT",
                        {"cx": 900.0, "cy": 10.0, "r": 5.0})
        assert status == 422

    def test_malformed_body_422(self, server):
        status, _ = api(server, "/api/annotation/img_0.pgm", "PUT", {"cx": "wat"})
        assert status == 422

    def test_listing_shows_annotation(self, server):
        api(server, "/api/annotation/img_1.pgm", "PUT", {"cx": 300, "cy": 200, "r": 30})
        _, items = api(server, "/api/images")
        entry = next(i for i in items if i["id"] == "img_1.pgm")
        assert entry["annotated"]
        assert entry["annotation"]["r"] == 30


class TestPersistence:
    def test_survives_restart(self, image_dir):
        srv = AnnotationServer(image_dir, port=0)
        srv.start_background()
        api(srv, "/api/annotation/img_0.pgm", "PUT", {"cx": 111.0, "cy": 222.0, "r": 33.0})
        srv.stop()

        again = AnnotationServer(image_dir, port=0)
        again.start_background()
        status, got = api(again, "/api/annotation/img_0.pgm")
        again.stop()
        assert status == 200
        assert (got["cx"], got["cy"], got["r"]) == (111.0, 222.0, 33.0)

    def test_manifest_validates_against_schema(self, image_dir):
        srv = AnnotationServer(image_dir, port=0)
        srv.start_background()
        api(srv, "/api/annotation/img_0.pgm", "PUT", {"cx": 100.0, "cy": 100.0, "r": 20.0})
        srv.stop()
        manifest = load_manifest(image_dir / "manifest.json")
        assert manifest.entries[0].path == "img_0.pgm"
        assert manifest.entries[0].category == "clear"
        assert manifest.entries[0].annotation.r == 20.0

    def test_concurrent_puts_serialized(self, server, image_dir):
        errors = []

        def put(i):
            try:
                status, _ = api(server, "/api/annotation/img_0.pgm", "PUT",
                                {"cx": float(i), "cy": float(i), "r": 1.0 + i})
                assert status == 200
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=put, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        manifest = load_manifest(image_dir / "manifest.json")
        assert len(manifest.entries) == 1  # one image, last write wins


class TestStatic:
    def test_placeholder_served_without_bundle(self, server):
        url = f"http://127.0.0.1:{server.port}/"
        with urllib.request.urlopen(url, timeout=5) as resp:
            body = resp.read().decode()
        assert resp.status == 200
        assert "<html" in body.lower()

    def test_bundle_served_when_present(self, image_dir, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<!doctype html><title>annotator</title>")
        (ui / "app.js").write_text("console.log('hi')")
        srv = AnnotationServer(image_dir, port=0, ui_dir=ui)
        srv.start_background()
        try:
            with urllib.request.urlopen(f"http://127.0.0.1:{srv.port}/", timeout=5) as resp:
                assert b"annotator" in resp.read()
            with urllib.request.urlopen(f"http://127.0.0.1:{srv.port}/app.js", timeout=5) as resp:
                assert resp.headers["Content-Type"].startswith("application/javascript")
        finally:
            srv.stop()

    def test_missing_dir_raises(self, tmp_path):
        with pytest.raises(NotADirectoryError):
            AnnotationServer(tmp_path / "nope", port=0)
