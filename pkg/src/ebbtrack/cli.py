"""``ebbtrack`` command line: ``track``, ``synth`` and ``eval``.

Exit codes: 0 success, 1 internal error, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_config, parse_config
from .detections import DetectionFormatError, load_detections
from .evaluation import evaluate
from .pipeline import run_tracking
from .synth import SynthConfig, write_synthetic
from .trackio import read_tracks, write_tracks

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _require(path: str, what: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"{what} not found: {path}")
    return p


def cmd_track(config_path: str, detections_path: str, out_dir: str) -> int:
    meta, cfg = load_config(_require(config_path, "config file"))
    seq = load_detections(_require(detections_path, "detections file"), meta)
    result = run_tracking(seq, cfg)
    write_tracks(result.forest, out_dir)
    # summary.json omits wall time so repeated runs stay byte-identical
    Path(out_dir, "summary.json").write_text(
        json.dumps(result.summary(timing=False), sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps(result.summary(), sort_keys=True))
    return EXIT_OK


def cmd_synth(synth_config_path: str, out_dir: str) -> int:
    with open(_require(synth_config_path, "synth config"), encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{synth_config_path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{synth_config_path}: expected a JSON object")
    tracker = doc.pop("tracker", None)
    try:
        cfg = SynthConfig.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{synth_config_path}: {exc}") from exc
    tracker_cfg = None
    if tracker is not None:
        _, tracker_cfg = parse_config({"frame_count": cfg.frame_count, "width": cfg.width,
                                       "height": cfg.height, "dt": cfg.dt, **tracker})
    info = write_synthetic(cfg, out_dir, tracker_cfg)
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


def cmd_eval(gt_dir: str, pred_dir: str, tau: float = 0.5, frame_count: int | None = None) -> int:
    if not 0.0 < tau <= 1.0:
        raise UsageError(f"tau must lie in (0, 1], got {tau}")
    gt = read_tracks(_require(gt_dir, "ground-truth directory"), frame_count)
    pred = read_tracks(_require(pred_dir, "prediction directory"), frame_count)
    print(json.dumps(evaluate(gt, pred, tau).to_dict(), sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ebbtrack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("track", help="track cells from a detections file")
    p.add_argument("config", help="JSON config (frame metadata and tracker parameters)")
    p.add_argument("detections", help="detections.csv")
    p.add_argument("out_dir", help="directory for tracks.txt, frames.csv, summary.json")

    p = sub.add_parser("synth", help="generate a synthetic sequence")
    p.add_argument("config", help="JSON synth config")
    p.add_argument("out_dir")

    p = sub.add_parser("eval", help="score predicted tracks against ground truth")
    p.add_argument("gt_dir", help="directory with tracks.txt and frames.csv")
    p.add_argument("pred_dir", help="directory with tracks.txt and frames.csv")
    p.add_argument("--tau", type=float, default=0.5, help="Hellinger match threshold (default 0.5)")
    p.add_argument("--frames", type=int, default=None, help="declared frame count of both forests")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "track":
            return cmd_track(args.config, args.detections, args.out_dir)
        if args.command == "synth":
            return cmd_synth(args.config, args.out_dir)
        return cmd_eval(args.gt_dir, args.pred_dir, args.tau, args.frames)
    except (UsageError, ConfigError, DetectionFormatError, FileNotFoundError) as exc:
        print(f"ebbtrack: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"ebbtrack: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
