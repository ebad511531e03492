"""Seeded synthetic cell sequences with ground-truth lineage.

Randomness comes only from :class:`random.Random` (Mersenne Twister,
MT19937) seeded with ``SynthConfig.seed``; the draw order is fixed by the loop
structure below, so a configuration always yields the same bytes.

Cells random-walk inside the frame with slowly drifting shape and angle. At a
division the parent's last frame is ``f`` and two smaller, rounder children
appear at ``f + 1`` on either side of the parent's long axis, drifting apart
with a decaying outward velocity. Other than that, cells may overlap freely.

Detections are the true ellipses with small noise, dropped with probability
``fn_rate`` (at most ``max_fn_run`` frames in a row when set), plus
``Poisson(fp_rate)`` uniformly placed spurious boxes per frame.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .config import Config, SequenceMeta, dump_config
from .detections import Detection, FrameSequence, write_detections
from .geometry import OrientedBox, normalize_angle
from .lineage import LineageForest, Track, TrackPoint
from .trackio import write_tracks


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_initial_cells: int = 10
    frame_count: int = 50
    width: float = 512.0
    height: float = 512.0
    dt: float = 12.0
    motion_sigma: float = 1.5
    a_range: tuple = (8.0, 13.0)
    b_range: tuple = (5.0, 8.0)
    shape_sigma: float = 0.05
    angle_sigma: float = 0.02
    mitosis_rate: float = 0.0
    apoptosis_rate: float = 0.0
    scheduled_mitoses: tuple = ()
    fn_rate: float = 0.0
    max_fn_run: int | None = None
    fp_rate: float = 0.0
    fp_score_range: tuple = (0.51, 0.6)
    tp_score_range: tuple = (0.9, 1.0)
    center_noise: float = 0.3
    size_noise: float = 0.02
    angle_noise: float = 0.02
    min_separation: float = 60.0
    margin: float = 15.0
    split_speed: float = 1.5
    split_decay: float = 0.9

    def __post_init__(self):
        for name in ("a_range", "b_range", "fp_score_range", "tp_score_range"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        object.__setattr__(self, "scheduled_mitoses",
                           tuple((int(f), int(lab)) for f, lab in self.scheduled_mitoses))
        for name in ("mitosis_rate", "apoptosis_rate", "fn_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be a probability, got {v!r}")
        for name in ("a_range", "b_range"):
            lo, hi = getattr(self, name)
            if not 0 < lo <= hi:
                raise ValueError(f"{name} must be an ordered positive range")
        for name in ("fp_score_range", "tp_score_range"):
            lo, hi = getattr(self, name)
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError(f"{name} must be an ordered range inside [0, 1]")
        if self.fp_rate < 0:
            raise ValueError("fp_rate must be non-negative")
        if self.n_initial_cells < 0 or self.frame_count < 0:
            raise ValueError("counts must be non-negative")
        if not (self.width > 2 * self.margin and self.height > 2 * self.margin and self.dt > 0):
            raise ValueError("frame too small for the margin, or dt not positive")

    @property
    def meta(self) -> SequenceMeta:
        return SequenceMeta(self.frame_count, self.width, self.height, self.dt)

    @classmethod
    def from_dict(cls, doc: dict) -> "SynthConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown synth config keys: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class _Cell:
    label: int
    x: float
    y: float
    a: float
    b: float
    theta: float
    a_target: float
    b_target: float
    points: list = field(default_factory=list)
    parent: int = 0
    missed: int = 0
    vx: float = 0.0
    vy: float = 0.0


def _poisson(rng: random.Random, lam: float) -> int:
    # Knuth's multiplication method; lam is a handful per frame at most
    if lam <= 0:
        return 0
    limit = math.exp(-lam)
    k, p = 0, rng.random()
    while p > limit:
        k += 1
        p *= rng.random()
    return k


def _reflect(v: float, lo: float, hi: float) -> float:
    span = hi - lo
    v = (v - lo) % (2 * span)
    return lo + (2 * span - v if v > span else v)


def _place(rng, cfg, placed):
    lo_x, hi_x = cfg.margin, cfg.width - cfg.margin
    lo_y, hi_y = cfg.margin, cfg.height - cfg.margin
    x = y = 0.0
    for _ in range(1000):
        x, y = rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)
        if all(math.hypot(x - px, y - py) >= cfg.min_separation for px, py in placed):
            break
    return x, y


def _divide(rng, cfg, cell, next_label):
    a_c = max(0.65 * cell.a, 0.8 * cell.b)
    b_c = 0.85 * a_c
    ux, uy = math.cos(cell.theta), math.sin(cell.theta)
    kids = []
    for sign in (1.0, -1.0):
        x = _reflect(cell.x + sign * cell.a * ux, cfg.margin, cfg.width - cfg.margin)
        y = _reflect(cell.y + sign * cell.a * uy, cfg.margin, cfg.height - cfg.margin)
        kids.append(_Cell(next_label, x, y, a_c, b_c, normalize_angle(cell.theta + math.pi / 2),
                          rng.uniform(*cfg.a_range), rng.uniform(*cfg.b_range), parent=cell.label,
                          vx=sign * cfg.split_speed * ux, vy=sign * cfg.split_speed * uy))
        next_label += 1
    return kids


def _step(rng, cfg, cell):
    cell.x = _reflect(cell.x + cell.vx + rng.gauss(0.0, cfg.motion_sigma), cfg.margin, cfg.width - cfg.margin)
    cell.y = _reflect(cell.y + cell.vy + rng.gauss(0.0, cfg.motion_sigma), cfg.margin, cfg.height - cfg.margin)
    cell.vx *= cfg.split_decay
    cell.vy *= cfg.split_decay
    cell.a = max(1.0, cell.a + 0.05 * (cell.a_target - cell.a) + rng.gauss(0.0, cfg.shape_sigma))
    cell.b = max(1.0, cell.b + 0.05 * (cell.b_target - cell.b) + rng.gauss(0.0, cfg.shape_sigma))
    cell.theta = normalize_angle(cell.theta + rng.gauss(0.0, cfg.angle_sigma))


def _observe(rng, cfg, cell, frame):
    x = min(max(cell.x + rng.gauss(0.0, cfg.center_noise), 0.0), cfg.width)
    y = min(max(cell.y + rng.gauss(0.0, cfg.center_noise), 0.0), cfg.height)
    w = 2.0 * cell.a * max(0.1, 1.0 + rng.gauss(0.0, cfg.size_noise))
    h = 2.0 * cell.b * max(0.1, 1.0 + rng.gauss(0.0, cfg.size_noise))
    theta = cell.theta + rng.gauss(0.0, cfg.angle_noise)
    score = rng.uniform(*cfg.tp_score_range)
    return (frame, OrientedBox(x, y, w, h, theta), score)


def _spurious(rng, cfg, frame):
    x = rng.uniform(0.0, cfg.width)
    y = rng.uniform(0.0, cfg.height)
    a = rng.uniform(*cfg.a_range)
    b = rng.uniform(*cfg.b_range)
    theta = rng.uniform(0.0, math.pi)
    score = rng.uniform(*cfg.fp_score_range)
    return (frame, OrientedBox(x, y, 2.0 * a, 2.0 * b, theta), score)


def generate(cfg: SynthConfig):
    """Return ``(sequence, truth, spurious_ids)``.

    ``truth`` holds the noise-free ellipses of every cell in every frame it is
    alive (dropped detections included); ``spurious_ids`` are the ids of the
    injected false-positive detections.
    """
    rng = random.Random(cfg.seed)
    schedule = {}
    for f, lab in cfg.scheduled_mitoses:
        schedule.setdefault(f, set()).add(lab)

    alive = []
    placed = []
    for k in range(cfg.n_initial_cells):
        x, y = _place(rng, cfg, placed)
        placed.append((x, y))
        a_t, b_t = rng.uniform(*cfg.a_range), rng.uniform(*cfg.b_range)
        alive.append(_Cell(k + 1, x, y, a_t, b_t, rng.uniform(0.0, math.pi), a_t, b_t))
    all_cells = list(alive)
    next_label = cfg.n_initial_cells + 1

    raw = []
    spurious = []
    for frame in range(cfg.frame_count):
        obs = []
        for cell in alive:
            cell.points.append(TrackPoint(frame, cell.x, cell.y, cell.a, cell.b, cell.theta, 1.0))
            drop = rng.random() < cfg.fn_rate
            if drop and cfg.max_fn_run is not None and cell.missed >= cfg.max_fn_run:
                drop = False
            if drop:
                cell.missed += 1
            else:
                cell.missed = 0
                obs.append((_observe(rng, cfg, cell, frame), False))
        for _ in range(_poisson(rng, cfg.fp_rate)):
            obs.append((_spurious(rng, cfg, frame), True))
        rng.shuffle(obs)
        raw.extend(obs)

        if frame == cfg.frame_count - 1:
            break
        survivors = []
        for cell in alive:
            if rng.random() < cfg.apoptosis_rate:
                continue
            if cell.label in schedule.get(frame, ()) or rng.random() < cfg.mitosis_rate:
                kids = _divide(rng, cfg, cell, next_label)
                next_label += 2
                survivors.extend(kids)
                all_cells.extend(kids)
                continue
            _step(rng, cfg, cell)
            survivors.append(cell)
        alive = survivors

    dets = []
    for (frame, box, score), is_fp in raw:
        det = Detection(frame, box, score, len(dets))
        dets.append(det)
        if is_fp:
            spurious.append(det.id)
    seq = FrameSequence.from_detections(dets, cfg.meta)
    tracks = [Track(c.label, c.parent, c.points) for c in all_cells if c.points]
    truth = LineageForest(tracks, cfg.frame_count)
    truth.validate()
    return seq, truth, frozenset(spurious)


def write_synthetic(cfg: SynthConfig, out_dir, tracker: Config | None = None) -> dict:
    """Write ``detections.csv``, ``config.json`` and ``gt/`` (tracks.txt, frames.csv).

    ``config.json`` carries the sequence metadata plus tracker parameters
    (defaults with ``alpha=0.9`` unless ``tracker`` is given).
    """
    seq, truth, spurious = generate(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_detections(out / "detections.csv", seq.detections())
    tracker = tracker or Config(alpha=0.9, dt=cfg.dt)
    tracker = Config(**{**asdict(tracker), "dt": cfg.dt})
    (out / "config.json").write_text(dump_config(cfg.meta, tracker), encoding="utf-8")
    write_tracks(truth, out / "gt")
    info = {
        "detections": sum(len(f) for f in seq.frames),
        "spurious": len(spurious),
        "tracks": len(truth.tracks),
        "mitoses": sum(1 for t in truth.tracks if t.parent_label) // 2,
    }
    (out / "gt" / "info.json").write_text(json.dumps(info, sort_keys=True) + "\n", encoding="utf-8")
    return info
