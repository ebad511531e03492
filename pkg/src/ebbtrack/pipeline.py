from __future__ import annotations

import time
from dataclasses import dataclass

from .association import HypothesisSet, generate_hypotheses
from .config import Config
from .detections import FrameSequence
from .ilp import IlpSolution, solve_map
from .lineage import AssemblyStats, LineageForest, assemble
from .tracklets import Tracklet, build_tracklets


@dataclass
class TrackingResult:
    tracklets: list[Tracklet]
    hypotheses: HypothesisSet
    solution: IlpSolution
    forest: LineageForest
    stats: AssemblyStats
    solve_ms: float

    def summary(self, timing: bool = True) -> dict:
        out = {
            "tracklets": len(self.tracklets),
            "hypotheses": len(self.hypotheses),
            "objective": self.solution.objective,
            "tracks": len(self.forest.tracks),
            "fp_removed": self.stats.fp_removed,
            "mitoses": self.stats.mitoses,
        }
        if timing:
            out["solve_ms"] = round(self.solve_ms, 3)
        return out


def run_tracking(seq: FrameSequence, cfg: Config) -> TrackingResult:
    cfg = cfg.with_frame(seq.width, seq.height)
    tracklets = build_tracklets(seq, cfg)
    hset = generate_hypotheses(tracklets, cfg)
    t0 = time.perf_counter()
    sol = solve_map(hset, threads=cfg.threads)
    solve_ms = 1000.0 * (time.perf_counter() - t0)
    stats = AssemblyStats()
    forest = assemble(tracklets, hset, sol, seq.frame_count, stats)
    return TrackingResult(tracklets, hset, sol, forest, stats, solve_ms)
