"""Command-line interface.

Subcommands: ``detect`` (single image, line-delimited JSON output),
``bench`` (manifest-driven benchmark with JSON and markdown reports),
``synth`` (deterministic synthetic corpus generation), and
``annotate-serve`` (local annotation UI + API server).

Exit codes: 0 success, 1 usage or input error, 2 when every requested
detector failed on the image. ``PUPILBENCH_LOG`` selects the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from pathlib import Path

from . import evaluation, overlay, synth
from .annotate import AnnotationServer
from .cht import ChtConfig
from .ef import EfConfig
from .errors import DecodeError, ManifestError, PupilBenchError
from .ido import IdoConfig
from .imaging import decode
from .model import METHODS
from .rst import RstConfig

log = logging.getLogger(__name__)

_RADII_RE = re.compile(r"^(\d+)\.\.(\d+)$")


def _radii(text: str) -> tuple[int, int]:
    m = _RADII_RE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected MIN..MAX, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if not 1 <= lo <= hi:
        raise argparse.ArgumentTypeError(f"need 1 <= MIN <= MAX, got {text!r}")
    return lo, hi


def _methods(text: str) -> list[str]:
    if text.strip().lower() == "all":
        return list(METHODS)
    out = []
    for part in text.split(","):
        name = part.strip().upper()
        if name not in METHODS:
            raise argparse.ArgumentTypeError(f"unknown method {part!r}")
        out.append(name)
    if not out:
        raise argparse.ArgumentTypeError("no methods selected")
    return out


def _proportions(text: str) -> tuple[int, ...]:
    try:
        weights = tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if len(weights) != 4 or any(w < 0 for w in weights) or sum(weights) == 0:
        raise argparse.ArgumentTypeError("need four non-negative weights with a positive sum")
    return weights


def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--radii", type=_radii, default=(5, 25), metavar="MIN..MAX",
                        help="search radius range in downsampled pixels (default 5..25)")
    parser.add_argument("--threshold", type=int, default=25,
                        help="dark-pixel intensity threshold (default 25)")
    parser.add_argument("--alpha", type=float, default=2.0,
                        help="radial strictness exponent (default 2)")
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument("--out", type=Path, default=None, help="output path or directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pupilbench", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect the pupil in one image")
    p.add_argument("image", type=Path)
    p.add_argument("--method", type=_methods, default=list(METHODS), metavar="NAME",
                   help="cht, ef, ido, rst, a comma list, or 'all' (default)")
    p.add_argument("--overlay", type=Path, default=None,
                   help="write a PNG with the detected shapes drawn on the input")
    _add_shared(p)

    p = sub.add_parser("bench", help="benchmark detectors over a manifest")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--methods", type=_methods, default=list(METHODS), metavar="NAMES")
    p.add_argument("--repeat", type=int, default=evaluation.DEFAULT_REPEAT,
                   help="timing repetitions per image (default %(default)s)")
    _add_shared(p)

    p = sub.add_parser("synth", help="generate a synthetic ground-truth corpus")
    p.add_argument("--count", type=int, default=80)
    p.add_argument("--proportions", type=_proportions, default=evaluation.DEFAULT_PROPORTIONS,
                   metavar="A,B,C,D", help="category weights (default reference-corpus ratio)")
    _add_shared(p)

    p = sub.add_parser("annotate-serve", help="serve the annotation UI and API")
    p.add_argument("--dir", type=Path, required=True, help="directory of images to annotate")
    p.add_argument("--manifest", type=Path, default=None,
                   help="manifest file (default <dir>/manifest.json)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.add_argument("--ui-dir", type=Path, default=None, help="static UI bundle directory")
    return parser


def _configs(args) -> dict:
    r_min, r_max = args.radii
    return {
        "CHT": ChtConfig(r_min=r_min, r_max=r_max),
        "EF": EfConfig(threshold=args.threshold),
        "IDO": IdoConfig(r_min=r_min, r_max=r_max, threshold=args.threshold),
        "RST": RstConfig(r_min=r_min, r_max=r_max, alpha=args.alpha),
    }


def cmd_detect(args) -> int:
    try:
        data = args.image.read_bytes()
    except OSError as exc:
        print(f"error: cannot read {args.image}: {exc}", file=sys.stderr)
        return 1
    try:
        img = decode(data)
    except DecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    configs = _configs(args)
    detections = [evaluation.detect_with_method(m, img, configs[m]) for m in args.method]
    for det in detections:
        print(json.dumps(det.to_json_dict()))
    if args.overlay is not None:
        overlay.draw_detections(img, detections).save(args.overlay, format="PNG")
    return 0 if any(d.ok for d in detections) else 2


def cmd_bench(args) -> int:
    out_dir = args.out or Path(".")
    try:
        manifest = evaluation.load_manifest(args.manifest)
        report = evaluation.run_benchmark(
            manifest, methods=args.methods, configs=_configs(args), repeat=args.repeat,
            progress=lambda p: log.info("benchmarked %s", p),
        )
    except (ManifestError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_bytes(evaluation.render_report(report, "json"))
    (out_dir / "report.md").write_bytes(evaluation.render_report(report, "markdown"))

    print(f"{'Method':8s} {'Global rate':>12s} {'Avg robustness':>15s} {'Median s':>10s}")
    for method in report.methods:
        s = report.summary(method)
        t = report.timing_for(method)
        print(f"{method:8s} {s.rate:11.2f}% {s.avg_robustness:14.2f}% {t.median_s:10.4f}")
    log.info("reports written to %s", out_dir)
    return 0


def cmd_synth(args) -> int:
    out_dir = args.out or Path("synth_corpus")
    if args.count < 1:
        print(f"error: count must be >= 1, got {args.count}", file=sys.stderr)
        return 1
    try:
        manifest_path = synth.generate_corpus(
            out_dir, count=args.count, seed=args.seed, proportions=args.proportions
        )
    except OSError as exc:
        print(f"error: cannot write corpus: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.count} images and {manifest_path}")
    return 0


def cmd_annotate_serve(args) -> int:
    try:
        server = AnnotationServer(
            image_dir=args.dir,
            manifest_path=args.manifest,
            host=args.host,
            port=args.port,
            ui_dir=args.ui_dir,
        )
    except (OSError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"annotation server on http://{server.host}:{server.port}/ (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.stop()
    return 0


_COMMANDS = {
    "detect": cmd_detect,
    "bench": cmd_bench,
    "synth": cmd_synth,
    "annotate-serve": cmd_annotate_serve,
}

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("PUPILBENCH_LOG", "warn").strip().lower()
    logging.basicConfig(level=_LOG_LEVELS.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except PupilBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
