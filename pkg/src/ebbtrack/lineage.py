"""Turn a MAP selection into final tracks with mitosis parent links."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .association import Kind
from .geometry import Ellipse, GaussianBB, OrientedBox, normalize_angle, obb_to_gaussian


@dataclass(frozen=True)
class TrackPoint:
    """One per-frame ellipse of a track; ``det_id`` is None when interpolated."""

    frame: int
    cx: float
    cy: float
    a: float
    b: float
    theta: float
    score: float
    interpolated: bool = False
    det_id: int | None = None

    @classmethod
    def from_detection(cls, det) -> "TrackPoint":
        e = det.ellipse
        return cls(det.frame, e.cx, e.cy, e.a, e.b, e.theta, det.score, False, det.id)

    @property
    def ellipse(self) -> Ellipse:
        return Ellipse(self.cx, self.cy, self.a, self.b, self.theta)

    @property
    def gaussian(self) -> GaussianBB:
        return obb_to_gaussian(OrientedBox(self.cx, self.cy, 2.0 * self.a, 2.0 * self.b, self.theta))


@dataclass
class Track:
    label: int
    parent_label: int
    points: list = field(default_factory=list)

    @property
    def begin_frame(self) -> int:
        return self.points[0].frame

    @property
    def end_frame(self) -> int:
        return self.points[-1].frame

    def __len__(self):
        return len(self.points)


@dataclass
class LineageForest:
    tracks: list
    frame_count: int | None = None

    def by_label(self) -> dict:
        return {t.label: t for t in self.tracks}

    def validate(self) -> None:
        labels = [t.label for t in self.tracks]
        if sorted(labels) != list(range(1, len(labels) + 1)):
            raise ValueError("track labels must be unique and contiguous from 1")
        index = self.by_label()
        for t in self.tracks:
            if not t.points:
                raise ValueError(f"track {t.label} is empty")
            frames = [p.frame for p in t.points]
            if frames != list(range(t.begin_frame, t.end_frame + 1)):
                raise ValueError(f"track {t.label} must have exactly one point per frame")
            if t.points[0].interpolated or t.points[-1].interpolated:
                raise ValueError(f"track {t.label} starts or ends on an interpolated point")
            if self.frame_count is not None and t.end_frame >= self.frame_count:
                raise ValueError(f"track {t.label} ends past frame_count")
            if t.parent_label:
                parent = index.get(t.parent_label)
                if parent is None:
                    raise ValueError(f"track {t.label} has unknown parent {t.parent_label}")
                if t.begin_frame <= parent.end_frame:
                    raise ValueError(f"track {t.label} begins before its parent ends")

    def n_points(self, include_interpolated: bool = True) -> int:
        return sum(1 for t in self.tracks for p in t.points if include_interpolated or not p.interpolated)


def interpolate_gap(last: TrackPoint, first: TrackPoint) -> list[TrackPoint]:
    """Fill frames strictly between two points.

    Center and semi-axes are linear in time; the angle follows the shorter way
    round modulo pi. The score is the mean of the two endpoint scores.
    """
    t = first.frame - last.frame
    dtheta = math.remainder(first.theta - last.theta, math.pi)
    score = 0.5 * (last.score + first.score)
    out = []
    for k in range(1, t):
        s = k / t
        out.append(TrackPoint(
            last.frame + k,
            last.cx + s * (first.cx - last.cx),
            last.cy + s * (first.cy - last.cy),
            last.a + s * (first.a - last.a),
            last.b + s * (first.b - last.b),
            normalize_angle(last.theta + s * dtheta),
            score,
            True,
        ))
    return out


def canonical_labels(tracks) -> None:
    """Relabel tracks 1..n by (begin frame, first detection id), remapping parents."""
    def key(t):
        first = t.points[0].det_id
        return (t.begin_frame, math.inf if first is None else first)

    ordered = sorted(tracks, key=key)
    remap = {t.label: k for k, t in enumerate(ordered, start=1)}
    for t in ordered:
        t.label = remap[t.label]
        t.parent_label = remap[t.parent_label] if t.parent_label else 0
    tracks[:] = ordered


@dataclass
class AssemblyStats:
    fp_removed: int = 0
    fp_tracklets: int = 0
    mitoses: int = 0
    merges: int = 0


def assemble(tracklets, hset, sol, frame_count: int | None = None, stats: AssemblyStats | None = None) -> LineageForest:
    """Apply the selected hypotheses to the tracklets.

    Translations concatenate tracklets (interpolating any gap), mitoses link two
    child tracks to the parent, false positives are dropped, and everything else
    becomes a root track. ``stats`` is filled in when given.
    """
    tracklets = list(tracklets)
    if not hset.is_feasible(sol.selected):
        raise ValueError("conflicting solution")
    stats = stats if stats is not None else AssemblyStats()
    nxt = {}
    linked = set()
    mitosis_of = {}
    dropped = set()
    for idx in sorted(sol.selected):
        h = hset.hypotheses[idx]
        if h.kind == Kind.TRANSLATION:
            j = h.targets[0]
            if tracklets[j].begin_frame <= tracklets[h.source].end_frame:
                raise ValueError("conflicting solution: non-causal translation")
            nxt[h.source] = j
            linked.add(j)
        elif h.kind == Kind.MITOSIS:
            mitosis_of[h.source] = h.targets
        elif h.kind == Kind.FALSE_POSITIVE:
            dropped.add(h.source)

    stats.fp_tracklets = len(dropped)
    stats.fp_removed = sum(len(tracklets[k]) for k in dropped)
    stats.mitoses = len(mitosis_of)
    stats.merges = len(nxt)

    tracks = []
    track_of = {}
    for x in tracklets:
        # every chain starts at a tracklet no translation leads into
        if x.id in dropped or x.id in linked:
            continue
        points = []
        k = x.id
        seen = set()
        while k is not None:
            if k in seen:
                raise ValueError("conflicting solution: cyclic translations")
            seen.add(k)
            chunk = [TrackPoint.from_detection(d) for d in tracklets[k].detections]
            if points:
                points.extend(interpolate_gap(points[-1], chunk[0]))
            points.extend(chunk)
            track_of[k] = len(tracks)
            k = nxt.get(k)
        tracks.append(Track(len(tracks) + 1, 0, points))

    for parent, children in mitosis_of.items():
        parent_track = tracks[track_of[parent]]
        for c in children:
            tracks[track_of[c]].parent_label = parent_track.label

    canonical_labels(tracks)
    forest = LineageForest(tracks, frame_count)
    forest.validate()
    return forest
