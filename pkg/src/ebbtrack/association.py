"""Hypotheses for global tracklet association.

Each hypothesis is one row of a binary constraint matrix ``C`` with
``2 * n_tracklets`` columns: column ``k`` marks tracklet ``k`` used as a
source, column ``n + k`` marks it used as a target. A selection of rows is
feasible when no column is used twice.

Kinds and their likelihoods (``dt`` in frames/hour):

* translation ``i -> j``: ``exp(-(c + 1) t / (dt * lambda_link))``
* mitosis ``p -> {c1, c2}``: ``exp(-(c1 + c2 + 1)(t1 + t2) / (4 dt lambda_mit))``
* false positive ``k``: ``(1 - alpha) (1 - s + tau_s) ** len``
* completeness ``k``: ``alpha (s - tau_s)``

``c`` is the center distance from the source's last detection to the target's
first detection and ``t`` the frame gap between them.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .config import Config


class Kind(enum.IntEnum):
    TRANSLATION = 0
    MITOSIS = 1
    FALSE_POSITIVE = 2
    COMPLETENESS = 3


@dataclass(frozen=True)
class Hypothesis:
    kind: Kind
    source: int
    targets: tuple
    likelihood: float

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        t = self.targets
        if self.kind == Kind.TRANSLATION:
            ok = len(t) == 1 and t[0] != self.source
        elif self.kind == Kind.MITOSIS:
            ok = len(t) == 2 and t[0] != t[1] and self.source not in t
        else:
            ok = t == (self.source,)
        if not ok:
            raise ValueError(f"malformed {self.kind.name} hypothesis {self.source} -> {t}")
        if not math.isfinite(self.likelihood):
            raise ValueError("likelihood must be finite")

    def columns(self, n_tracklets: int) -> tuple:
        return (self.source,) + tuple(n_tracklets + t for t in self.targets)


@dataclass
class HypothesisSet:
    n_tracklets: int
    hypotheses: list

    def __len__(self):
        return len(self.hypotheses)

    def rows(self) -> list[tuple]:
        return [h.columns(self.n_tracklets) for h in self.hypotheses]

    @property
    def rho(self) -> np.ndarray:
        return np.array([h.likelihood for h in self.hypotheses], dtype=np.float64)

    def constraint_matrix(self) -> np.ndarray:
        C = np.zeros((len(self.hypotheses), 2 * self.n_tracklets), dtype=np.int8)
        for r, cols in enumerate(self.rows()):
            C[r, list(cols)] = 1
        return C

    def is_feasible(self, selected) -> bool:
        used = set()
        for idx in selected:
            for col in self.hypotheses[idx].columns(self.n_tracklets):
                if col in used:
                    return False
                used.add(col)
        return True

    def count(self, kind: Kind) -> int:
        return sum(1 for h in self.hypotheses if h.kind == kind)


def _center_distance(xi, xj) -> float:
    (x1, y1), (x2, y2) = xi.last.center, xj.first.center
    return math.hypot(x2 - x1, y2 - y1)


def _gap(xi, xj) -> int:
    return xj.begin_frame - xi.end_frame


def p_link(xi, xj, cfg: Config) -> float:
    t = _gap(xi, xj)
    if t < 1:
        raise ValueError(f"non-causal link: tracklet {xj.id} starts {t} frames after {xi.id} ends")
    c = _center_distance(xi, xj)
    return math.exp(-(c + 1.0) * t / (cfg.dt * cfg.lambda_link))


def p_mit(xp, xc1, xc2, cfg: Config) -> float:
    if xc1 is xc2 or xc1.id == xc2.id:
        raise ValueError("mitosis children must be distinct")
    t1, t2 = _gap(xp, xc1), _gap(xp, xc2)
    if t1 < 1 or t2 < 1:
        raise ValueError(f"non-causal mitosis from tracklet {xp.id}")
    c1, c2 = _center_distance(xp, xc1), _center_distance(xp, xc2)
    return math.exp(-(c1 + c2 + 1.0) * (t1 + t2) / (4.0 * cfg.dt * cfg.lambda_mit))


def p_fp(x, cfg: Config) -> float:
    return (1.0 - cfg.alpha) * (1.0 - x.mean_score + cfg.tau_s) ** len(x)


def p_cplt(x, cfg: Config) -> float:
    return cfg.alpha * (x.mean_score - cfg.tau_s)


def _successors(tracklets, cfg: Config) -> list[list[int]]:
    """For each tracklet, the tracklets passing the time and space gates after it."""
    if cfg.space_th is None:
        raise ValueError("space_th is unset; use Config.with_frame(width, height)")
    by_begin = {}
    for x in tracklets:
        by_begin.setdefault(x.begin_frame, []).append(x)
    succ = []
    for xi in tracklets:
        out = []
        for t in range(1, cfg.t_th + 1):
            for xj in by_begin.get(xi.end_frame + t, ()):
                if _center_distance(xi, xj) < cfg.space_th:
                    out.append(xj.id)
        out.sort()
        succ.append(out)
    return succ


def generate_hypotheses(tracklets, cfg: Config) -> HypothesisSet:
    """Build the hypothesis rows, ordered translation, mitosis, FP/completeness."""
    tracklets = list(tracklets)
    for k, x in enumerate(tracklets):
        if x.id != k:
            raise ValueError("tracklet ids must equal their list position")
    succ = _successors(tracklets, cfg)

    translations = []
    mitoses = []
    for xi in tracklets:
        kids = succ[xi.id]
        for j in kids:
            translations.append(Hypothesis(Kind.TRANSLATION, xi.id, (j,), p_link(xi, tracklets[j], cfg)))
        for a in range(len(kids)):
            for b in range(a + 1, len(kids)):
                c1, c2 = tracklets[kids[a]], tracklets[kids[b]]
                mitoses.append(Hypothesis(Kind.MITOSIS, xi.id, (c1.id, c2.id), p_mit(xi, c1, c2, cfg)))

    singles = []
    for x in tracklets:
        if x.mean_score < cfg.tau_fp:
            singles.append(Hypothesis(Kind.FALSE_POSITIVE, x.id, (x.id,), p_fp(x, cfg)))
            singles.append(Hypothesis(Kind.COMPLETENESS, x.id, (x.id,), p_cplt(x, cfg)))

    return HypothesisSet(len(tracklets), translations + mitoses + singles)
