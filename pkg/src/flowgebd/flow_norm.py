"""Boundary detection by normalized dense flow.

For every patch, the largest dense-flow displacement between consecutive
frames forms a temporal series of length L-1. Each patch series is
L2-normalized; transitions whose normalized value strictly exceeds theta2
are raw boundaries (an all-zero series yields none). Per-patch raw sets
are unioned and optionally refined.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boundaries import (BoundarySet, RefineConfig, indices_to_timestamps,
                         make_boundary_set, refine)
from .errors import ConfigError
from .frames import FrameSequence
from .grid import PatchGrid
from .kernels import FlowParams, expand_pyramid, flow_from_expansions, max_flow_magnitude


@dataclass(frozen=True)
class FnConfig:
    theta2: float = 0.25  # normalized-motion threshold
    flow: FlowParams = field(default_factory=FlowParams)

    def validate(self) -> None:
        if not 0.0 < self.theta2 < 1.0:
            raise ConfigError(f"theta2 must be in (0, 1), got {self.theta2}")
        self.flow.validate()


@dataclass
class PatchFlowSeries:
    """values[k] is the max flow magnitude of transition k+1 (between frames
    k and k+1)."""

    patch_index: int
    values: np.ndarray  # (L-1,) float64, >= 0

    @property
    def normalized(self) -> np.ndarray:
        return normalize_series(self.values)


def normalize_series(values: np.ndarray) -> np.ndarray:
    """L2-normalize; an identically-zero series stays all-zero."""
    v = np.asarray(values, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return np.zeros_like(v)
    return v / norm


def series_boundary_indices(values: np.ndarray, theta2: float) -> list[int]:
    """Transition indices whose normalized value strictly exceeds theta2."""
    normalized = normalize_series(values)
    return [int(k) + 1 for k in np.nonzero(normalized > theta2)[0]]


def patchflow_series(seq: FrameSequence, grid: PatchGrid,
                     cfg: FnConfig | None = None) -> list[PatchFlowSeries]:
    """Per-patch temporal series of max dense-flow magnitudes."""
    if cfg is None:
        cfg = FnConfig()
    cfg.validate()
    if len(seq) < 2:
        raise ConfigError("detection needs at least 2 frames")
    fb = cfg.flow.farneback
    levels = cfg.flow.pyramid_levels
    n_patches = len(grid)
    length = len(seq) - 1
    values = np.zeros((n_patches, length), dtype=np.float64)

    def patch_batch(frame: np.ndarray) -> np.ndarray:
        return np.stack([frame[p.y0:p.y1, p.x0:p.x1] for p in grid.patches])

    exp_prev = expand_pyramid(patch_batch(seq.frames[0]).astype(np.float32), fb, levels)
    for t in range(1, len(seq)):
        exp_next = expand_pyramid(patch_batch(seq.frames[t]).astype(np.float32),
                                  fb, levels)
        flow = flow_from_expansions(exp_prev, exp_next, fb)
        for p in range(n_patches):
            values[p, t - 1] = max_flow_magnitude(flow[p])
        exp_prev = exp_next
    return [PatchFlowSeries(p, values[p]) for p in range(n_patches)]


def detect_fn_raw(seq: FrameSequence, grid: PatchGrid,
                  cfg: FnConfig | None = None) -> list[list[int]]:
    """Per-patch raw boundary transition indices."""
    if cfg is None:
        cfg = FnConfig()
    series = patchflow_series(seq, grid, cfg)
    return [series_boundary_indices(s.values, cfg.theta2) for s in series]


def detect_fn(seq: FrameSequence, grid: PatchGrid, cfg: FnConfig | None = None,
              refine_boundaries: bool = True,
              refine_cfg: RefineConfig | None = None) -> BoundarySet:
    """Patchwise flow-normalization detection."""
    raw = detect_fn_raw(seq, grid, cfg)
    times: list[float] = []
    for indices in raw:
        times.extend(indices_to_timestamps(indices, seq.sample_fps))
    if refine_boundaries:
        ts = refine(times, refine_cfg)
    else:
        ts = sorted(set(times))
    return make_boundary_set(ts, seq.source_duration)


def dump_series_csv(series: list[PatchFlowSeries], path: Path) -> None:
    """Inspection dump: one row per (patch, transition)."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["patch_index", "t_index", "value", "normalized"])
        for s in series:
            normalized = s.normalized
            for k, (v, nv) in enumerate(zip(s.values, normalized)):
                w.writerow([s.patch_index, k + 1, f"{v:.6f}", f"{nv:.6f}"])
