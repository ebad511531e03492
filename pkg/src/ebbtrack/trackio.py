"""Track table (``tracks.txt``) and per-frame ellipse table (``frames.csv``).

``tracks.txt`` has one line per track, ``label begin_frame end_frame
parent_label``, space separated, with parent 0 for roots (CTC ``man_track``
layout). ``frames.csv`` has a header and one row per track point:
``frame,label,cx,cy,a,b,theta,score,interpolated``.
"""
from __future__ import annotations

import csv
import os
from pathlib import Path

from .lineage import LineageForest, Track, TrackPoint

TRACKS_FILE = "tracks.txt"
FRAMES_FILE = "frames.csv"
FRAME_COLUMNS = ("frame", "label", "cx", "cy", "a", "b", "theta", "score", "interpolated")


def format_track_table(forest: LineageForest) -> str:
    lines = [f"{t.label} {t.begin_frame} {t.end_frame} {t.parent_label}\n"
             for t in sorted(forest.tracks, key=lambda t: t.label)]
    return "".join(lines)


def format_frame_table(forest: LineageForest) -> str:
    rows = []
    for t in forest.tracks:
        for p in t.points:
            rows.append((p.frame, t.label, p))
    rows.sort(key=lambda r: (r[0], r[1]))
    out = [",".join(FRAME_COLUMNS) + "\n"]
    for frame, label, p in rows:
        out.append(f"{frame},{label},{p.cx!r},{p.cy!r},{p.a!r},{p.b!r},{p.theta!r},{p.score!r},{int(p.interpolated)}\n")
    return "".join(out)


def write_tracks(forest: LineageForest, out_dir: str | os.PathLike) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tracks_path = out / TRACKS_FILE
    frames_path = out / FRAMES_FILE
    with open(tracks_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_track_table(forest))
    with open(frames_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_frame_table(forest))
    return tracks_path, frames_path


def read_tracks(in_dir: str | os.PathLike, frame_count: int | None = None) -> LineageForest:
    """Inverse of :func:`write_tracks`. Detection ids are not stored and come back as None."""
    src = Path(in_dir)
    spans = {}
    with open(src / TRACKS_FILE, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"{src / TRACKS_FILE}:{lineno}: expected 4 fields")
            label, begin, end, parent = (int(v) for v in parts)
            spans[label] = (begin, end, parent)

    points = {label: [] for label in spans}
    with open(src / FRAMES_FILE, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != FRAME_COLUMNS:
            raise ValueError(f"{src / FRAMES_FILE}: bad header")
        for row in reader:
            if not row:
                continue
            frame, label = int(row[0]), int(row[1])
            cx, cy, a, b, theta, score = (float(v) for v in row[2:8])
            if label not in points:
                raise ValueError(f"{src / FRAMES_FILE}:{reader.line_num}: unknown label {label}")
            points[label].append(TrackPoint(frame, cx, cy, a, b, theta, score, row[8] == "1"))

    tracks = []
    for label in sorted(spans):
        begin, end, parent = spans[label]
        pts = sorted(points[label], key=lambda p: p.frame)
        if not pts or pts[0].frame != begin or pts[-1].frame != end:
            raise ValueError(f"track {label}: span {begin}-{end} disagrees with {FRAMES_FILE}")
        tracks.append(Track(label, parent, pts))
    forest = LineageForest(tracks, frame_count)
    forest.validate()
    return forest
