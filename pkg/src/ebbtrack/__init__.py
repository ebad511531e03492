"""Cell tracking-by-detection with elliptical boxes and global MAP association."""
from .association import Hypothesis, HypothesisSet, Kind, generate_hypotheses, p_cplt, p_fp, p_link, p_mit
from .config import Config, ConfigError, SequenceMeta, load_config
from .detections import Detection, FrameSequence, load_detections
from .geometry import (
    Ellipse,
    GaussianBB,
    OrientedBox,
    SingularCovarianceError,
    bhattacharyya_distance,
    hellinger_distance,
    obb_to_ellipse,
    obb_to_gaussian,
)
from .ilp import IlpSolution, solve_map, solve_map_bruteforce
from .lineage import LineageForest, Track, TrackPoint, assemble
from .pipeline import run_tracking
from .tracklets import Tracklet, associate_adjacent, build_tracklets

__version__ = "0.1.0"
