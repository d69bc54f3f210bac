"""Local HTTP service hosting the annotation UI and persisting annotations.

Serves the static UI bundle at ``/`` and a small JSON API underneath
``/api``:

    GET /api/images            image list with annotation status
    GET /api/image/<id>        raw image bytes
    GET /api/annotation/<id>   stored annotation, 404 when absent
    PUT /api/annotation/<id>   validate and persist an annotation

Writes are serialized through one lock and the manifest file is replaced
atomically (temp file + rename), so a crash never leaves a half-written
manifest. The server binds the loopback interface unless told otherwise.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote

from .errors import DecodeError
from .evaluation import DatasetEntry, DatasetManifest, load_manifest, save_manifest
from .imaging import decode
from .model import Annotation

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".pgm")

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "application/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".pgm": "image/x-portable-graymap",
    ".ico": "image/x-icon",
    ".map": "application/json",
}

_PLACEHOLDER_PAGE = b"""<!doctype html>
<html><head><meta charset="utf-8"><title>pupilbench annotator</title></head>
<body><h1>Annotation UI bundle not built</h1>
<p>The JSON API under <code>/api</code> is live. Build the frontend
(<code>cd frontend && npm install && npm run build</code>) to get the
interactive annotator here.</p></body></html>
"""


def default_ui_dir() -> Path | None:
    bundled = Path(__file__).parent / "ui"
    return bundled if (bundled / "index.html").exists() else None


class AnnotationStore:
    """Image directory plus manifest-backed annotation persistence."""

    def __init__(self, image_dir: str | Path, manifest_path: str | Path | None = None):
        self.image_dir = Path(image_dir)
        if not self.image_dir.is_dir():
            raise NotADirectoryError(f"image directory not found: {self.image_dir}")
        self.manifest_path = Path(manifest_path) if manifest_path else self.image_dir / "manifest.json"
        self._lock = threading.Lock()
        self._entries: dict[str, DatasetEntry] = {}
        self._dims: dict[str, tuple[int, int]] = {}
        if self.manifest_path.exists():
            manifest = load_manifest(self.manifest_path)
            self._entries = {e.path: e for e in manifest.entries}

    def image_names(self) -> list[str]:
        return sorted(
            p.name for p in self.image_dir.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES
        )

    def image_path(self, name: str) -> Path | None:
        # ids are bare file names from image_names(); reject anything else
        if "/" in name or "\\" in name or name == "..":
            return None
        path = self.image_dir / name
        return path if (path.is_file() and path.suffix.lower() in IMAGE_SUFFIXES) else None

    def image_size(self, name: str) -> tuple[int, int] | None:
        if name in self._dims:
            return self._dims[name]
        path = self.image_path(name)
        if path is None:
            return None
        try:
            img = decode(path.read_bytes())
        except (OSError, DecodeError):
            return None
        self._dims[name] = (img.width, img.height)
        return self._dims[name]

    def get_annotation(self, name: str) -> Annotation | None:
        entry = self._entries.get(name)
        return entry.annotation if entry else None

    def put_annotation(self, name: str, ann: Annotation) -> None:
        with self._lock:
            existing = self._entries.get(name)
            category = existing.category if existing else "clear"
            self._entries[name] = DatasetEntry(path=name, category=category, annotation=ann)
            manifest = DatasetManifest(
                root=self.image_dir,
                entries=tuple(self._entries[n] for n in sorted(self._entries)),
            )
            save_manifest(manifest, self.manifest_path)

    def list_payload(self) -> list[dict]:
        out = []
        for name in self.image_names():
            size = self.image_size(name)
            ann = self.get_annotation(name)
            out.append(
                {
                    "id": name,
                    "width": size[0] if size else None,
                    "height": size[1] if size else None,
                    "annotated": ann is not None,
                    "annotation": ann.to_json_dict() if ann else None,
                }
            )
        return out


def _make_handler(store: AnnotationStore, ui_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            log.debug("%s %s", self.address_string(), fmt % args)

        def _send(self, status: int, body: bytes, content_type: str = "application/json") -> None:
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_json(self, status: int, payload) -> None:
            self._send(status, json.dumps(payload).encode("utf-8"))

        def do_GET(self):
            path = unquote(self.path.split("?", 1)[0])
            if path == "/api/images":
                self._send_json(200, store.list_payload())
            elif path.startswith("/api/image/"):
                self._get_image(path[len("/api/image/"):])
            elif path.startswith("/api/annotation/"):
                self._get_annotation(path[len("/api/annotation/"):])
            else:
                self._static(path)

        def do_PUT(self):
            path = unquote(self.path.split("?", 1)[0])
            if not path.startswith("/api/annotation/"):
                self._send_json(404, {"error": "not found"})
                return
            self._put_annotation(path[len("/api/annotation/"):])

        def _get_image(self, name: str) -> None:
            file_path = store.image_path(name)
            if file_path is None:
                self._send_json(404, {"error": f"unknown image {name!r}"})
                return
            ctype = _CONTENT_TYPES.get(file_path.suffix.lower(), "application/octet-stream")
            self._send(200, file_path.read_bytes(), ctype)

        def _get_annotation(self, name: str) -> None:
            if store.image_path(name) is None:
                self._send_json(404, {"error": f"unknown image {name!r}"})
                return
            ann = store.get_annotation(name)
            if ann is None:
                self._send_json(404, {"error": "not annotated"})
            else:
                self._send_json(200, ann.to_json_dict())

        def _put_annotation(self, name: str) -> None:
            if store.image_path(name) is None:
                self._send_json(404, {"error": f"unknown image {name!r}"})
                return
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length)
            try:
                payload = json.loads(raw)
                cx = float(payload["cx"])
                cy = float(payload["cy"])
                r = float(payload["r"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                self._send_json(422, {"error": "annotation must carry numeric cx, cy, r"})
                return
            if r <= 0:
                self._send_json(422, {"error": f"radius must be positive, got {r}"})
                return
            size = store.image_size(name)
            if size is None:
                self._send_json(422, {"error": "image cannot be decoded"})
                return
            if not (0 <= cx < size[0] and 0 <= cy < size[1]):
                self._send_json(422, {"error": "center outside image bounds"})
                return
            ann = Annotation(
                cx=cx,
                cy=cy,
                r=r,
                annotator=str(payload.get("annotator", "anonymous")),
                timestamp=int(payload.get("timestamp", 0)),
            )
            store.put_annotation(name, ann)
            self._send_json(200, ann.to_json_dict())

        def _static(self, path: str) -> None:
            if path == "/":
                path = "/index.html"
            if ui_dir is None:
                if path == "/index.html":
                    self._send(200, _PLACEHOLDER_PAGE, "text/html; charset=utf-8")
                else:
                    self._send_json(404, {"error": "not found"})
                return
            target = (ui_dir / path.lstrip("/")).resolve()
            if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
                self._send_json(404, {"error": "not found"})
                return
            ctype = _CONTENT_TYPES.get(target.suffix.lower(), "application/octet-stream")
            self._send(200, target.read_bytes(), ctype)

    return Handler


class AnnotationServer:
    """ThreadingHTTPServer wrapper; use port 0 for an ephemeral port."""

    def __init__(
        self,
        image_dir: str | Path,
        manifest_path: str | Path | None = None,
        host: str = "127.0.0.1",
        port: int = 8321,
        ui_dir: str | Path | None = None,
    ):
        self.store = AnnotationStore(image_dir, manifest_path)
        resolved_ui = Path(ui_dir) if ui_dir else default_ui_dir()
        handler = _make_handler(self.store, resolved_ui)
        self.httpd = ThreadingHTTPServer((host, port), handler)
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    @property
    def host(self) -> str:
        return self.httpd.server_address[0]

    def serve_forever(self) -> None:
        log.info("annotation server listening on http://%s:%d/", self.host, self.port)
        self.httpd.serve_forever()

    def start_background(self) -> None:
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
