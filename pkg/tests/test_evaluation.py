import itertools

import pytest

from ebbtrack.evaluation import clear_mot, evaluate, id_measures, overlap_counts
from ebbtrack.lineage import LineageForest, Track, TrackPoint

N = 10


def pt(frame, y, interpolated=False):
    return TrackPoint(frame, 5.0 * frame, y, 3.0, 2.0, 0.0, 0.9, interpolated)


def gt_pair():
    return LineageForest([Track(1, 0, [pt(f, 0.0) for f in range(N)]),
                          Track(2, 0, [pt(f, 100.0) for f in range(N)])], N)


def swapped():
    half = N // 2
    a = [pt(f, 0.0) for f in range(half)] + [pt(f, 100.0) for f in range(half, N)]
    b = [pt(f, 100.0) for f in range(half)] + [pt(f, 0.0) for f in range(half, N)]
    return LineageForest([Track(1, 0, a), Track(2, 0, b)], N)


def brute_idf1(gt, pred, tau=0.5):
    g, p, counts = overlap_counts(gt, pred, tau)
    total = sum(len(t) for t in gt.tracks) + sum(len(t) for t in pred.tracks)
    best = 0
    k = max(len(g), len(p))
    for perm in itertools.permutations(range(k)):
        tp = sum(counts[i, j] for i, j in enumerate(perm) if i < len(g) and j < len(p))
        best = max(best, tp)
    return 2 * best / total


def test_identical():
    rep = evaluate(gt_pair(), gt_pair())
    assert (rep.mota, rep.precision, rep.recall, rep.id_f1) == (1.0, 1.0, 1.0, 1.0)
    assert rep.id_switches == 0 and rep.gt_count == 2 * N


@pytest.mark.parametrize("tau", [0.01, 0.5, 1.0])
def test_self_comparison_any_tau(tau):
    assert clear_mot(gt_pair(), gt_pair(), tau).mota == 1.0


def test_empty_prediction():
    rep = evaluate(gt_pair(), LineageForest([], N))
    assert rep.mota == 0.0 and rep.recall == 0.0
    assert rep.fn == rep.gt_count == 2 * N
    assert rep.id_f1 == 0.0


def test_label_swap():
    rep = evaluate(gt_pair(), swapped())
    assert rep.id_switches == 2
    assert rep.fp == rep.fn == 0
    assert rep.mota == pytest.approx(1 - 2 / (2 * N))
    assert rep.id_f1 < 1.0
    assert rep.id_f1 == pytest.approx(brute_idf1(gt_pair(), swapped()), abs=1e-15)
    assert rep.id_f1 == pytest.approx(0.5)


def test_missing_track():
    pred = LineageForest([Track(1, 0, [pt(f, 0.0) for f in range(N)])], N)
    rep = id_measures(gt_pair(), pred)
    assert rep.id_r == 0.5 and rep.id_p == 1.0
    assert rep.id_f1 == pytest.approx(2 * rep.id_p * rep.id_r / (rep.id_p + rep.id_r))


def test_interpolation_flag_does_not_matter():
    flagged = LineageForest([Track(1, 0, [pt(f, 0.0, 0 < f < N - 1) for f in range(N)]),
                             Track(2, 0, [pt(f, 100.0) for f in range(N)])], N)
    assert evaluate(gt_pair(), flagged) == evaluate(gt_pair(), gt_pair())
    assert evaluate(flagged, swapped()) == evaluate(gt_pair(), swapped())


def test_harmonic_mean_on_partial_overlap():
    pred = LineageForest([Track(1, 0, [pt(f, 0.0) for f in range(4)]),
                          Track(2, 0, [pt(f, 0.0) for f in range(4, N)]),
                          Track(3, 0, [pt(f, 300.0) for f in range(3)])], N)
    rep = evaluate(gt_pair(), pred)
    assert rep.id_f1 == pytest.approx(2 * rep.id_p * rep.id_r / (rep.id_p + rep.id_r), abs=1e-15)
    assert rep.id_f1 == pytest.approx(brute_idf1(gt_pair(), pred), abs=1e-15)
    assert rep.mota == pytest.approx(1 - (rep.fn + rep.fp + rep.id_switches) / rep.gt_count)
    assert rep.fp == 3


def test_frame_range_mismatch():
    with pytest.raises(ValueError, match="frame range mismatch"):
        evaluate(gt_pair(), LineageForest([], N + 1))
    with pytest.raises(ValueError, match="frame range mismatch"):
        evaluate(LineageForest(gt_pair().tracks, N - 2), LineageForest([], None))
