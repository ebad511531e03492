import math
import random

import pytest

from ebbtrack.config import Config
from ebbtrack.detections import Detection
from ebbtrack.geometry import OrientedBox
from ebbtrack.tracklets import Tracklet


def make_det(frame, cx, cy, w=8.0, h=4.0, theta=0.0, score=0.95, id=0):
    return Detection(frame, OrientedBox(cx, cy, w, h, theta), score, id)


def make_tracklet(tid, begin, centers, score=0.95, id_base=None, w=8.0, h=4.0):
    """Tracklet whose k-th detection sits at ``centers[k]`` in frame ``begin + k``."""
    base = tid * 1000 if id_base is None else id_base
    dets = [make_det(begin + k, x, y, w, h, 0.0, score, base + k) for k, (x, y) in enumerate(centers)]
    return Tracklet(tid, dets)


def random_box(rng: random.Random, spread=30.0):
    return OrientedBox(rng.uniform(-spread, spread), rng.uniform(-spread, spread),
                       rng.uniform(1.0, 25.0), rng.uniform(1.0, 25.0), rng.uniform(-math.pi, 2 * math.pi))


@pytest.fixture
def cfg():
    return Config(alpha=0.9, dt=12.0, space_th=100.0)


def topology(forest):
    """Label-free shape of a forest: sorted ``(begin, end, parent span)`` triples."""
    spans = {t.label: (t.begin_frame, t.end_frame) for t in forest.tracks}
    return sorted((t.begin_frame, t.end_frame, spans.get(t.parent_label)) for t in forest.tracks)


_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = dict(rep.user_properties).get("detail", "")
        _CRITERIA.append((marker.args[0], rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else ""))
