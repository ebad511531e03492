"""Per-frame score filtering and Hellinger-distance non-maximum suppression."""
from __future__ import annotations

import numpy as np

from .geometry import hellinger_matrix


def filter_by_score(frame, tau_s: float) -> list:
    """Keep detections scoring strictly above ``tau_s``, in input order."""
    return [d for d in frame if d.score > tau_s]


def hellinger_nms(frame, tau_h: float) -> list:
    """Greedy NMS: the best remaining detection suppresses every q with H_D < tau_h.

    Output is ordered by descending score; equal scores go to the smaller id.
    """
    order = sorted(frame, key=lambda d: (-d.score, d.id))
    n = len(order)
    if n <= 1:
        return order
    dist = hellinger_matrix([d.gaussian for d in order], [d.gaussian for d in order])
    alive = np.ones(n, dtype=bool)
    keep = []
    for i in range(n):
        if not alive[i]:
            continue
        keep.append(order[i])
        alive[i + 1:] &= ~(dist[i, i + 1:] < tau_h)
    return keep
