"""CLEAR-MOT and ID-measure scores between two lineage forests.

A ground-truth point and a predicted point may match only when their
Hellinger distance is below ``tau``. Interpolated points count like any other.
Parent links are ignored here.

CLEAR-MOT conventions used:

* a correspondence from the previous frame is kept while its distance stays
  below ``tau``; the remaining objects are matched by minimum total distance;
* an identity switch is counted when a ground-truth track is matched to a
  different predicted track than the one it was last matched to;
* ``precision = matches / (matches + fp)``, ``recall = matches / gt_count``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .assignment import INFEASIBLE, solve_assignment
from .geometry import gaussian_array, hellinger_matrix


@dataclass
class EvalReport:
    mota: float = 0.0
    precision: float = 0.0
    recall: float = 0.0
    id_f1: float = 0.0
    id_p: float = 0.0
    id_r: float = 0.0
    fp: int = 0
    fn: int = 0
    id_switches: int = 0
    gt_count: int = 0
    matches: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _per_frame(forest):
    """``{frame: (labels, (n, 5) gaussian array)}``."""
    buckets = {}
    for t in forest.tracks:
        for p in t.points:
            buckets.setdefault(p.frame, []).append((t.label, p.gaussian))
    out = {}
    for frame, items in buckets.items():
        items.sort(key=lambda x: x[0])
        out[frame] = ([lab for lab, _ in items], gaussian_array([g for _, g in items]))
    return out


def _check_range(gt, pred):
    if gt.frame_count is not None and pred.frame_count is not None and gt.frame_count != pred.frame_count:
        raise ValueError(f"frame range mismatch: {gt.frame_count} vs {pred.frame_count}")
    declared = [f.frame_count for f in (gt, pred) if f.frame_count is not None]
    if not declared:
        return
    for forest in (gt, pred):
        for t in forest.tracks:
            if t.end_frame >= min(declared):
                raise ValueError(f"frame range mismatch: track {t.label} reaches frame {t.end_frame}")


def clear_mot(gt, pred, tau: float = 0.5) -> EvalReport:
    _check_range(gt, pred)
    g_frames = _per_frame(gt)
    p_frames = _per_frame(pred)
    rep = EvalReport()
    last_match = {}
    prev = {}
    for frame in sorted(set(g_frames) | set(p_frames)):
        g_labels, g_arr = g_frames.get(frame, ([], np.zeros((0, 5))))
        p_labels, p_arr = p_frames.get(frame, ([], np.zeros((0, 5))))
        rep.gt_count += len(g_labels)
        dist = hellinger_matrix(g_arr, p_arr)
        g_pos = {lab: i for i, lab in enumerate(g_labels)}
        p_pos = {lab: j for j, lab in enumerate(p_labels)}

        current = {}
        for g_lab, p_lab in prev.items():
            i, j = g_pos.get(g_lab), p_pos.get(p_lab)
            if i is not None and j is not None and dist[i, j] < tau:
                current[g_lab] = p_lab
        free_g = [i for i, lab in enumerate(g_labels) if lab not in current]
        taken = set(current.values())
        free_p = [j for j, lab in enumerate(p_labels) if lab not in taken]
        if free_g and free_p:
            sub = dist[np.ix_(free_g, free_p)]
            sub = np.where(sub < tau, sub, INFEASIBLE)
            for r, c in solve_assignment(sub):
                current[g_labels[free_g[r]]] = p_labels[free_p[c]]

        for g_lab, p_lab in current.items():
            if g_lab in last_match and last_match[g_lab] != p_lab:
                rep.id_switches += 1
            last_match[g_lab] = p_lab
        rep.matches += len(current)
        rep.fn += len(g_labels) - len(current)
        rep.fp += len(p_labels) - len(current)
        prev = current

    if rep.gt_count:
        rep.mota = 1.0 - (rep.fn + rep.fp + rep.id_switches) / rep.gt_count
        rep.recall = rep.matches / rep.gt_count
    if rep.matches + rep.fp:
        rep.precision = rep.matches / (rep.matches + rep.fp)
    return rep


def overlap_counts(gt, pred, tau: float = 0.5):
    """Frames in which each (gt, pred) track pair lies within ``tau``.

    Returns ``(gt_labels, pred_labels, counts)`` with ``counts[i, j]`` the
    number of shared frames where the two tracks match.
    """
    g_labels = sorted(t.label for t in gt.tracks)
    p_labels = sorted(t.label for t in pred.tracks)
    gi = {lab: i for i, lab in enumerate(g_labels)}
    pj = {lab: j for j, lab in enumerate(p_labels)}
    counts = np.zeros((len(g_labels), len(p_labels)), dtype=np.int64)
    g_frames = _per_frame(gt)
    p_frames = _per_frame(pred)
    for frame, (gl, ga) in g_frames.items():
        if frame not in p_frames:
            continue
        pl, pa = p_frames[frame]
        hit = hellinger_matrix(ga, pa) < tau
        for i, j in zip(*np.nonzero(hit)):
            counts[gi[gl[i]], pj[pl[j]]] += 1
    return g_labels, p_labels, counts


def track_matching(gt, pred, tau: float = 0.5) -> dict:
    """Global one-to-one gt-to-pred track matching maximizing matched frames."""
    g_labels, p_labels, counts = overlap_counts(gt, pred, tau)
    if not g_labels or not p_labels:
        return {}
    cost = np.where(counts > 0, -counts.astype(np.float64), INFEASIBLE)
    return {g_labels[r]: p_labels[c] for r, c in solve_assignment(cost)}


def id_measures(gt, pred, tau: float = 0.5) -> EvalReport:
    """ID-P, ID-R and ID-F1 from the best global track correspondence.

    Minimizing ID-FP + ID-FN over one-to-one track pairings is the same as
    maximizing the number of matched frames over those pairings.
    """
    _check_range(gt, pred)
    g_labels, p_labels, counts = overlap_counts(gt, pred, tau)
    gt_len = sum(len(t) for t in gt.tracks)
    pred_len = sum(len(t) for t in pred.tracks)
    idtp = 0
    if g_labels and p_labels:
        mapping = track_matching(gt, pred, tau)
        gi = {lab: i for i, lab in enumerate(g_labels)}
        pj = {lab: j for j, lab in enumerate(p_labels)}
        idtp = int(sum(counts[gi[g], pj[p]] for g, p in mapping.items()))
    rep = EvalReport(gt_count=gt_len)
    rep.id_p = idtp / pred_len if pred_len else 0.0
    rep.id_r = idtp / gt_len if gt_len else 0.0
    rep.id_f1 = 2 * idtp / (gt_len + pred_len) if gt_len + pred_len else 0.0
    return rep


def evaluate(gt, pred, tau: float = 0.5) -> EvalReport:
    rep = clear_mot(gt, pred, tau)
    ids = id_measures(gt, pred, tau)
    rep.id_f1, rep.id_p, rep.id_r = ids.id_f1, ids.id_p, ids.id_r
    return rep
