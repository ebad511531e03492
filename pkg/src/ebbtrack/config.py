"""Tracker parameters and sequence metadata.

Both are read from one flat JSON document, e.g.::

    {"frame_count": 92, "width": 1024, "height": 1024, "dt": 12,
     "tau_s": 0.5, "tau_h": 0.5, "tau_o": 0.5, "t_th": 3, "tau_FP": 0.9,
     "lambda_link": 25, "lambda_mit": 50, "alpha": 0.8993}

``space_th`` defaults to a tenth of the frame diagonal when omitted.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, fields, replace

# detector precision per CTC training sequence
ALPHA_BY_DATASET = {
    "GOWT1-01": 0.8993,
    "GOWT1-02": 0.8644,
    "U373-01": 0.7673,
    "U373-02": 0.6867,
    "HeLa-01": 0.7930,
    "HeLa-02": 0.7899,
}

# capture rate in frames/hour
DT_BY_DATASET = {"GOWT1": 12.0, "U373": 4.0, "HeLa": 2.0}


class ConfigError(ValueError):
    pass


def default_space_th(width: float, height: float) -> float:
    return 0.1 * math.sqrt(width * width + height * height)


@dataclass(frozen=True)
class Config:
    """Thresholds and likelihood parameters of the tracker.

    The frame gate for translation/mitosis candidates is ``1 <= t <= t_th``
    (inclusive); the space gate is ``distance < space_th`` (strict).
    """

    alpha: float
    dt: float
    space_th: float | None = None
    tau_s: float = 0.5
    tau_h: float = 0.5
    tau_o: float = 0.5
    t_th: int = 3
    tau_fp: float = 0.9
    lambda_link: float = 25.0
    lambda_mit: float = 50.0
    threads: int | None = None

    def __post_init__(self):
        for name in ("tau_s", "tau_h", "tau_o", "tau_fp", "alpha"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
                raise ConfigError(f"{name} must lie in [0, 1], got {v!r}")
        for name in ("lambda_link", "lambda_mit", "dt"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be a positive number, got {v!r}")
        if isinstance(self.t_th, bool) or not isinstance(self.t_th, int) or self.t_th < 1:
            raise ConfigError(f"t_th must be a positive integer, got {self.t_th!r}")
        if self.space_th is not None and not (self.space_th > 0):
            raise ConfigError(f"space_th must be positive, got {self.space_th!r}")
        if self.threads is not None and (not isinstance(self.threads, int) or self.threads < 1):
            raise ConfigError(f"threads must be a positive integer, got {self.threads!r}")

    def with_frame(self, width: float, height: float) -> "Config":
        """Fill in the default space threshold for a frame size."""
        if self.space_th is not None:
            return self
        return replace(self, space_th=default_space_th(width, height))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tau_FP"] = d.pop("tau_fp")
        return {k: v for k, v in d.items() if v is not None}


@dataclass(frozen=True)
class SequenceMeta:
    frame_count: int
    width: float
    height: float
    dt: float

    def __post_init__(self):
        if isinstance(self.frame_count, bool) or not isinstance(self.frame_count, int) or self.frame_count < 0:
            raise ConfigError(f"frame_count must be a non-negative integer, got {self.frame_count!r}")
        for name in ("width", "height", "dt"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"{name} must be positive, got {v!r}")


_CONFIG_KEYS = {f.name for f in fields(Config)} - {"tau_fp"} | {"tau_FP"}
_META_KEYS = {"frame_count", "width", "height", "dt"}


def parse_config(doc: dict) -> tuple[SequenceMeta, Config]:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS - _META_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = [k for k in ("frame_count", "width", "height", "dt", "alpha") if k not in doc]
    if missing:
        raise ConfigError(f"missing config keys: {missing}")
    meta = SequenceMeta(doc["frame_count"], doc["width"], doc["height"], doc["dt"])
    kw = {k: v for k, v in doc.items() if k in _CONFIG_KEYS and k not in ("tau_FP",)}
    if "tau_FP" in doc:
        kw["tau_fp"] = doc["tau_FP"]
    try:
        cfg = Config(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return meta, cfg.with_frame(meta.width, meta.height)


def load_config(path: str | os.PathLike) -> tuple[SequenceMeta, Config]:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(doc)


def dump_config(meta: SequenceMeta, cfg: Config) -> str:
    doc = {"frame_count": meta.frame_count, "width": meta.width, "height": meta.height}
    doc.update(cfg.to_dict())
    doc["dt"] = meta.dt
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
