"""Gap-free tracklets from adjacent-frame Hungarian association."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .assignment import INFEASIBLE, solve_assignment
from .geometry import hellinger_matrix
from .suppression import filter_by_score, hellinger_nms


@dataclass(frozen=True)
class Tracklet:
    id: int
    detections: tuple

    def __post_init__(self):
        object.__setattr__(self, "detections", tuple(self.detections))
        if not self.detections:
            raise ValueError("tracklet needs at least one detection")
        for prev, cur in zip(self.detections, self.detections[1:]):
            if cur.frame != prev.frame + 1:
                raise ValueError(f"tracklet {self.id} is not contiguous at frame {prev.frame}")

    @property
    def begin_frame(self) -> int:
        return self.detections[0].frame

    @property
    def end_frame(self) -> int:
        return self.detections[-1].frame

    @property
    def first(self):
        return self.detections[0]

    @property
    def last(self):
        return self.detections[-1]

    @property
    def mean_score(self) -> float:
        return math.fsum(d.score for d in self.detections) / len(self.detections)

    def __len__(self):
        return len(self.detections)


def associate_adjacent(frame_a, frame_b, tau_o: float) -> list[tuple[int, int]]:
    """Match detections of two consecutive frames; returns ``(a_id, b_id)`` pairs.

    Cost is the Hellinger distance; pairs at or above ``tau_o`` are never made.
    """
    if not frame_a or not frame_b:
        return []
    cost = hellinger_matrix([d.gaussian for d in frame_a], [d.gaussian for d in frame_b])
    cost = np.where(cost < tau_o, cost, INFEASIBLE)
    return [(frame_a[r].id, frame_b[c].id) for r, c in solve_assignment(cost)]


def preprocess_frame(frame, tau_s: float, tau_h: float) -> list:
    return hellinger_nms(filter_by_score(frame, tau_s), tau_h)


def _map(fn, items, threads):
    if threads is not None and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def build_tracklets(seq, cfg) -> list[Tracklet]:
    """Filter and suppress every frame, then chain adjacent-frame matches.

    Tracklet ids follow ``(begin_frame, first detection id)`` order and equal
    their position in the returned list.
    """
    frames = _map(lambda f: preprocess_frame(f, cfg.tau_s, cfg.tau_h), list(seq.frames), cfg.threads)
    links = _map(lambda k: associate_adjacent(frames[k], frames[k + 1], cfg.tau_o),
                 list(range(len(frames) - 1)), cfg.threads)

    chains = []
    chain_of = {}
    for k, frame in enumerate(frames):
        prev = dict((b, a) for a, b in links[k - 1]) if k > 0 else {}
        for det in frame:
            src = prev.get(det.id)
            if src is None:
                chain = [det]
                chains.append(chain)
            else:
                chain = chain_of[src]
                chain.append(det)
            chain_of[det.id] = chain

    chains.sort(key=lambda c: (c[0].frame, c[0].id))
    return [Tracklet(i, c) for i, c in enumerate(chains)]
