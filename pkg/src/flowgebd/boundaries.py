"""Boundary timestamps: index conversion, temporal refinement, prediction I/O.

Raw detections are transition indices i in [1, L-1], meaning "content
changed between frame i-1 and frame i"; they convert to seconds as
t = i / sample_fps (the later frame's sample instant). Refinement clusters
a sorted timestamp multiset left to right: a new cluster starts when the
incoming timestamp is at least theta3 away from every member of the open
cluster (equivalently from its last member, since input is sorted), and
each cluster is represented by its lower median, so every output timestamp
is one of the inputs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigError, EvalValidationError


@dataclass(frozen=True)
class RefineConfig:
    theta3: float = 0.5  # seconds; cluster separation distance

    def validate(self) -> None:
        if self.theta3 <= 0:
            raise ConfigError(f"theta3 must be positive, got {self.theta3}")


@dataclass(frozen=True)
class BoundarySet:
    """Strictly ascending event timestamps inside (0, video duration)."""

    timestamps: tuple[float, ...]
    video_duration: float

    def __post_init__(self) -> None:
        prev = 0.0
        for t in self.timestamps:
            if not t > prev:
                raise EvalValidationError(
                    f"timestamps must be strictly ascending and > 0: {self.timestamps}")
            if t >= self.video_duration:
                raise EvalValidationError(
                    f"timestamp {t} is not inside (0, {self.video_duration})")
            prev = t

    def __len__(self) -> int:
        return len(self.timestamps)


def indices_to_timestamps(indices: Iterable[int], sample_fps: float) -> list[float]:
    """Transition indices to seconds (t = i / fps)."""
    if sample_fps <= 0:
        raise ConfigError(f"sample_fps must be positive, got {sample_fps}")
    return [i / sample_fps for i in indices]


def refine(raw: Sequence[float], cfg: RefineConfig | None = None) -> list[float]:
    """Collapse a timestamp multiset to one representative per cluster.

    Clusters chain: each element within theta3 of the previous one extends
    the cluster even if it is farther than theta3 from earlier members.
    Returns sorted, deduplicated lower medians.
    """
    if cfg is None:
        cfg = RefineConfig()
    cfg.validate()
    ordered = sorted(raw)
    if not ordered:
        return []
    out: list[float] = []
    cluster: list[float] = []
    for t in ordered:
        if cluster and t - cluster[-1] >= cfg.theta3:
            out.append(cluster[(len(cluster) - 1) // 2])
            cluster = []
        cluster.append(t)
    out.append(cluster[(len(cluster) - 1) // 2])
    return sorted(set(out))


def make_boundary_set(timestamps: Sequence[float], video_duration: float) -> BoundarySet:
    return BoundarySet(tuple(timestamps), video_duration)


@dataclass
class Prediction:
    """One detector run on one video, as serialized to disk."""

    video_id: str
    sample_fps: float
    duration_s: float
    method: str                      # "pt" | "fn" | "ensemble"
    boundaries_s: list[float]
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "video_id": self.video_id,
            "sample_fps": self.sample_fps,
            "duration_s": self.duration_s,
            "method": self.method,
            "boundaries_s": list(self.boundaries_s),
            "config": self.config,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def write(self, out_dir: Path) -> Path:
        out = Path(out_dir) / f"{self.video_id}.json"
        out.write_text(self.to_json())
        return out


def read_prediction(path: Path) -> Prediction:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as e:
        raise EvalValidationError(f"cannot read prediction file {path}: {e}") from e
    try:
        return Prediction(video_id=str(payload["video_id"]),
                          sample_fps=float(payload["sample_fps"]),
                          duration_s=float(payload["duration_s"]),
                          method=str(payload["method"]),
                          boundaries_s=[float(t) for t in payload["boundaries_s"]],
                          config=dict(payload.get("config", {})))
    except (KeyError, ValueError, json.JSONDecodeError) as e:
        raise EvalValidationError(f"bad prediction file {path}: {e}") from e
