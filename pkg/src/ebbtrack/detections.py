"""Per-frame oriented-box detections and the ``detections.csv`` reader."""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from functools import cached_property

from .config import SequenceMeta
from .geometry import Ellipse, GaussianBB, OrientedBox, obb_to_ellipse, obb_to_gaussian

CSV_COLUMNS = ("frame", "cx", "cy", "w", "h", "theta_rad", "score")


class DetectionFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Detection:
    frame: int
    box: OrientedBox
    score: float
    id: int

    def __post_init__(self):
        if not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score must lie in [0, 1], got {self.score!r}")
        if self.frame < 0:
            raise ValueError(f"frame must be non-negative, got {self.frame!r}")

    @cached_property
    def gaussian(self) -> GaussianBB:
        return obb_to_gaussian(self.box)

    @cached_property
    def ellipse(self) -> Ellipse:
        return obb_to_ellipse(self.box)

    @property
    def center(self) -> tuple[float, float]:
        return (self.box.cx, self.box.cy)


@dataclass(frozen=True)
class FrameSequence:
    frames: tuple[tuple[Detection, ...], ...]
    width: float
    height: float
    dt: float
    frame_count: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(tuple(f) for f in self.frames))
        object.__setattr__(self, "frame_count", len(self.frames))
        if not (self.width > 0 and self.height > 0 and self.dt > 0):
            raise ValueError("width, height and dt must be positive")
        seen = set()
        for k, frame in enumerate(self.frames):
            for det in frame:
                if det.frame != k:
                    raise ValueError(f"detection {det.id} filed under frame {k} but has frame {det.frame}")
                if det.id in seen:
                    raise ValueError(f"duplicate detection id {det.id}")
                seen.add(det.id)

    @property
    def meta(self) -> SequenceMeta:
        return SequenceMeta(self.frame_count, self.width, self.height, self.dt)

    def __len__(self):
        return self.frame_count

    def detections(self):
        for frame in self.frames:
            yield from frame

    @classmethod
    def from_detections(cls, detections, meta: SequenceMeta) -> "FrameSequence":
        frames = [[] for _ in range(meta.frame_count)]
        for det in detections:
            if det.frame >= meta.frame_count:
                raise ValueError(f"detection {det.id} at frame {det.frame} >= frame_count {meta.frame_count}")
            frames[det.frame].append(det)
        return cls(frames, meta.width, meta.height, meta.dt)


def _parse_row(row, lineno):
    if len(row) != len(CSV_COLUMNS):
        raise DetectionFormatError(f"line {lineno}: expected {len(CSV_COLUMNS)} fields, got {len(row)}")
    try:
        frame_f = float(row[0])
        vals = [float(v) for v in row[1:]]
    except ValueError as exc:
        raise DetectionFormatError(f"line {lineno}: {exc}") from None
    if not frame_f.is_integer() or frame_f < 0:
        raise DetectionFormatError(f"line {lineno}: frame must be a non-negative integer, got {row[0]!r}")
    if not all(math.isfinite(v) for v in vals):
        raise DetectionFormatError(f"line {lineno}: non-finite value")
    return int(frame_f), vals


def load_detections(path: str | os.PathLike, meta: SequenceMeta) -> FrameSequence:
    """Read ``detections.csv``.

    Detection ids are assigned 0, 1, 2, ... in file order, and detections keep
    their file order within each frame. Errors name the 1-based line number.
    """
    dets = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return FrameSequence([[] for _ in range(meta.frame_count)], meta.width, meta.height, meta.dt)
        if tuple(h.strip() for h in header) != CSV_COLUMNS:
            raise DetectionFormatError(f"line 1: expected header {','.join(CSV_COLUMNS)}")
        for row in reader:
            lineno = reader.line_num
            if not row or all(not v.strip() for v in row):
                continue
            frame, (cx, cy, w, h, theta, score) = _parse_row(row, lineno)
            if not (0.0 <= score <= 1.0):
                raise DetectionFormatError(f"line {lineno}: score {score} outside [0, 1]")
            if frame >= meta.frame_count:
                raise DetectionFormatError(f"line {lineno}: frame {frame} >= frame_count {meta.frame_count}")
            try:
                box = OrientedBox(cx, cy, w, h, theta)
            except ValueError as exc:
                raise DetectionFormatError(f"line {lineno}: {exc}") from None
            dets.append(Detection(frame, box, score, len(dets)))
    return FrameSequence.from_detections(dets, meta)


def write_detections(path: str | os.PathLike, detections) -> None:
    """Write detections in the ``detections.csv`` layout (floats as shortest repr)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for d in detections:
            b = d.box
            fh.write(f"{d.frame},{b.cx!r},{b.cy!r},{b.w!r},{b.h!r},{b.theta!r},{d.score!r}\n")
