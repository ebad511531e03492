import math

import pytest

from ebbtrack.association import (
    Hypothesis,
    HypothesisSet,
    Kind,
    generate_hypotheses,
    p_cplt,
    p_fp,
    p_link,
    p_mit,
)
from ebbtrack.config import Config

from conftest import make_tracklet


def test_p_link_values(cfg):
    a = make_tracklet(0, 0, [(0, 0)])
    assert p_link(a, make_tracklet(1, 1, [(0, 0)]), cfg) == pytest.approx(0.9966722160545233, abs=1e-15)
    assert p_link(a, make_tracklet(1, 1, [(299, 0)]), cfg) == pytest.approx(math.exp(-1), abs=1e-15)
    assert p_link(a, make_tracklet(1, 1, [(1e9, 0)]), cfg) == 0.0
    with pytest.raises(ValueError, match="non-causal link"):
        p_link(a, make_tracklet(1, 0, [(0, 0)]), cfg)


def test_p_link_uses_gap_and_last_detection(cfg):
    a = make_tracklet(0, 0, [(100, 100), (3, 4)])
    b = make_tracklet(1, 4, [(0, 0), (50, 50)])
    assert p_link(a, b, cfg) == pytest.approx(math.exp(-6 * 3 / 300), abs=1e-15)


def test_p_mit_values(cfg):
    p = make_tracklet(0, 0, [(0, 0)])
    c1, c2 = make_tracklet(1, 1, [(0, 0)]), make_tracklet(2, 1, [(0, 0)])
    assert p_mit(p, c1, c2, cfg) == pytest.approx(0.9991670137924584, abs=1e-15)
    f1, f2 = make_tracklet(1, 1, [(599.5, 0)]), make_tracklet(2, 1, [(0, 599.5)])
    assert p_mit(p, f1, f2, cfg) == pytest.approx(math.exp(-1), abs=1e-15)
    g1, g2 = make_tracklet(1, 2, [(3, 0)]), make_tracklet(2, 1, [(0, 7)])
    assert p_mit(p, g1, g2, cfg) == p_mit(p, g2, g1, cfg)
    with pytest.raises(ValueError):
        p_mit(p, c1, c1, cfg)
    with pytest.raises(ValueError):
        p_mit(p, c1, make_tracklet(2, 0, [(0, 0)]), cfg)


def test_fp_and_completeness_values():
    cfg = Config(alpha=0.9, dt=12.0, space_th=10.0)
    one = make_tracklet(0, 0, [(0, 0)], score=1.0)
    three = make_tracklet(0, 0, [(0, 0)] * 3, score=1.0)
    assert p_fp(one, cfg) == pytest.approx(0.05, abs=1e-15)
    assert p_fp(three, cfg) == pytest.approx(0.0125, abs=1e-15)
    assert p_cplt(one, cfg) == pytest.approx(0.45, abs=1e-15)
    assert p_cplt(make_tracklet(0, 0, [(0, 0)], score=0.5), cfg) == 0.0
    sure = Config(alpha=1.0, dt=12.0, space_th=10.0)
    assert p_fp(three, sure) == 0.0
    never = Config(alpha=0.0, dt=12.0, space_th=10.0)
    assert p_cplt(one, never) == 0.0


def test_isolated_low_score_tracklet(cfg):
    hs = generate_hypotheses([make_tracklet(0, 0, [(0, 0)], score=0.6)], cfg)
    assert [h.kind for h in hs.hypotheses] == [Kind.FALSE_POSITIVE, Kind.COMPLETENESS]
    assert hs.rows() == [(0, 1), (0, 1)]


@pytest.mark.parametrize("score", [0.95, 0.9])
def test_isolated_confident_tracklet_has_no_rows(cfg, score):
    assert len(generate_hypotheses([make_tracklet(0, 0, [(0, 0)], score=score)], cfg)) == 0


def test_adjacent_pair_single_translation(cfg):
    a = make_tracklet(0, 0, [(10, 10)] * 5)
    b = make_tracklet(1, 5, [(12, 10)] * 4)
    hs = generate_hypotheses([a, b], cfg)
    assert len(hs) == 1
    h = hs.hypotheses[0]
    assert (h.kind, h.source, h.targets) == (Kind.TRANSLATION, 0, (1,))
    assert h.likelihood == p_link(a, b, cfg)
    assert hs.constraint_matrix().tolist() == [[1, 0, 0, 1]]


@pytest.mark.parametrize("gap, expected", [(1, 1), (3, 1), (4, 0)])
def test_time_gate_is_inclusive(cfg, gap, expected):
    a = make_tracklet(0, 0, [(10, 10)])
    b = make_tracklet(1, gap, [(10, 10)])
    assert generate_hypotheses([a, b], cfg).count(Kind.TRANSLATION) == expected


def test_space_gate_is_strict():
    cfg = Config(alpha=0.9, dt=12.0, space_th=5.0)
    a = make_tracklet(0, 0, [(0, 0)])
    assert len(generate_hypotheses([a, make_tracklet(1, 1, [(3, 4)])], cfg)) == 0
    assert len(generate_hypotheses([a, make_tracklet(1, 1, [(3, 3.99)])], cfg)) == 1


def test_overlapping_tracklets_are_not_linked(cfg):
    a = make_tracklet(0, 0, [(0, 0)] * 3)
    b = make_tracklet(1, 2, [(0, 0)] * 3)
    assert len(generate_hypotheses([a, b], cfg)) == 0


@pytest.mark.parametrize("k", [0, 1, 2, 3, 5])
def test_mitosis_count(cfg, k):
    parent = make_tracklet(0, 0, [(100, 100)])
    kids = [make_tracklet(i + 1, 1 + i % 3, [(100 + 5 * i, 100)]) for i in range(k)]
    hs = generate_hypotheses([parent] + kids, cfg)
    mit = [h for h in hs.hypotheses if h.kind == Kind.MITOSIS and h.source == 0]
    assert len(mit) == k * (k - 1) // 2
    assert all(h.targets[0] < h.targets[1] for h in mit)


def test_row_order_and_gates(cfg):
    tl = [make_tracklet(0, 0, [(0, 0)] * 2, score=0.7),
          make_tracklet(1, 2, [(5, 0)] * 2, score=0.95),
          make_tracklet(2, 3, [(0, 8)] * 2, score=0.6),
          make_tracklet(3, 5, [(400, 0)], score=0.8)]
    hs = generate_hypotheses(tl, cfg)
    kinds = [h.kind for h in hs.hypotheses]
    block = [min(k, Kind.FALSE_POSITIVE) for k in kinds]
    assert block == sorted(block)
    singles = [(h.source, h.kind) for h in hs.hypotheses if h.kind >= Kind.FALSE_POSITIVE]
    assert singles == sorted(singles)
    for h in hs.hypotheses:
        if h.kind in (Kind.TRANSLATION, Kind.MITOSIS):
            for t in h.targets:
                gap = tl[t].begin_frame - tl[h.source].end_frame
                dist = math.dist(tl[h.source].last.center, tl[t].first.center)
                assert 1 <= gap <= cfg.t_th and dist < cfg.space_th
            assert 0 < h.likelihood <= 1
        else:
            assert tl[h.source].mean_score < cfg.tau_fp
        if h.kind == Kind.FALSE_POSITIVE:
            assert h.likelihood >= 0
        if h.kind == Kind.COMPLETENESS:
            assert -cfg.alpha * cfg.tau_s <= h.likelihood <= cfg.alpha * (1 - cfg.tau_s)
    assert hs.count(Kind.FALSE_POSITIVE) == hs.count(Kind.COMPLETENESS) == 3
    C = hs.constraint_matrix()
    assert C.shape == (len(hs), 8)
    assert set(C.sum(axis=1)) <= {2, 3}


def test_hypothesis_validation():
    with pytest.raises(ValueError):
        Hypothesis(Kind.TRANSLATION, 0, (0,), 0.5)
    with pytest.raises(ValueError):
        Hypothesis(Kind.MITOSIS, 0, (1, 1), 0.5)
    with pytest.raises(ValueError):
        Hypothesis(Kind.FALSE_POSITIVE, 0, (1,), 0.5)
    with pytest.raises(ValueError):
        Hypothesis(Kind.COMPLETENESS, 0, (0,), math.nan)
    hs = HypothesisSet(3, [Hypothesis(Kind.MITOSIS, 0, (1, 2), 0.5)])
    assert hs.rows() == [(0, 4, 5)]


def test_unset_space_threshold_is_an_error():
    with pytest.raises(ValueError, match="space_th"):
        generate_hypotheses([make_tracklet(0, 0, [(0, 0)])], Config(alpha=0.9, dt=12.0))
