"""Boundary detection by sparse pixel tracking.

Each region (patch) runs an independent causal stream: key pixels are
sampled in the first frame and tracked frame to frame; a pixel survives a
transition when the tracker reports it tracked and its new position is
still inside the region. When the surviving fraction of the last sampled
base set falls below theta1, the transition index is recorded as a raw
boundary and the base set is resampled from the current frame. Patchwise
detection unions all per-patch raw boundaries and optionally applies
temporal refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundaries import (BoundarySet, RefineConfig, indices_to_timestamps,
                         make_boundary_set, refine)
from .errors import ConfigError
from .frames import FrameSequence
from .grid import PatchGrid, PatchRect
from .kernels import (FlowParams, build_track_pyramid, lk_track_pyramids,
                      mix_seed, sample_uniform, shi_tomasi_corners)

SAMPLERS = ("uniform-random", "shi-tomasi")


@dataclass(frozen=True)
class PtConfig:
    theta1: float = 0.4                 # survival-ratio threshold
    sampler: str = "uniform-random"
    sample_fraction: float = 0.05       # fraction of region pixels to sample
    sample_cap: int = 400               # per-region point budget
    corner_quality: float = 0.01        # shi-tomasi quality level
    corner_min_distance: float = 3.0
    require_nonzero_flow: bool = False  # literal |d| > 0 survival variant
    flow: FlowParams = field(default_factory=FlowParams)
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 < self.theta1 < 1.0:
            raise ConfigError(f"theta1 must be in (0, 1), got {self.theta1}")
        if self.sampler not in SAMPLERS:
            raise ConfigError(f"sampler must be one of {SAMPLERS}, got {self.sampler!r}")
        if not 0.0 < self.sample_fraction <= 1.0:
            raise ConfigError(f"sample_fraction must be in (0, 1], got {self.sample_fraction}")
        if self.sample_cap < 1:
            raise ConfigError(f"sample_cap must be >= 1, got {self.sample_cap}")
        self.flow.validate()


@dataclass
class PtStreamResult:
    """Raw boundaries of one region plus its survival-ratio trace
    (measured ratio per transition, before any resampling)."""

    region: PatchRect
    boundary_indices: list[int]
    survival_ratios: np.ndarray  # (L-1,) float64


def _sample_region(frame: np.ndarray, region: PatchRect, cfg: PtConfig,
                   seed: int) -> np.ndarray:
    h, w = frame.shape
    count = min(math.ceil(cfg.sample_fraction * region.width * region.height),
                cfg.sample_cap)
    if cfg.sampler == "shi-tomasi":
        crop = frame[region.y0:region.y1, region.x0:region.x1]
        pts = shi_tomasi_corners(crop, count, cfg.corner_quality,
                                 cfg.corner_min_distance)
        if len(pts):
            return pts + np.array([region.x0, region.y0], dtype=np.float64)
        # flat region: corner detection found nothing, fall back
    return sample_uniform(w, h, region, cfg.sample_fraction, cfg.sample_cap, seed)


class _Stream:
    __slots__ = ("region", "seed", "points", "base_count", "resamples",
                 "boundary_indices", "ratios")

    def __init__(self, region: PatchRect, seed: int):
        self.region = region
        self.seed = seed
        self.points = np.empty((0, 2), dtype=np.float64)
        self.base_count = 0
        self.resamples = 0
        self.boundary_indices: list[int] = []
        self.ratios: list[float] = []

    def sample(self, frame: np.ndarray, cfg: PtConfig) -> None:
        self.points = _sample_region(frame, self.region, cfg,
                                     mix_seed(self.seed, self.resamples))
        self.base_count = len(self.points)
        self.resamples += 1


def _run_streams(seq: FrameSequence, regions: list[PatchRect],
                 cfg: PtConfig, seeds: list[int]) -> list[PtStreamResult]:
    cfg.validate()
    if len(seq) < 2:
        raise ConfigError("detection needs at least 2 frames")
    params = cfg.flow
    streams = [_Stream(r, s) for r, s in zip(regions, seeds)]
    for st in streams:
        st.sample(seq.frames[0], cfg)
    pyr_prev = build_track_pyramid(seq.frames[0], params.pyramid_levels, params.window)
    for t in range(1, len(seq)):
        pyr_next = build_track_pyramid(seq.frames[t], params.pyramid_levels,
                                       params.window)
        live = [st for st in streams if len(st.points)]
        if live:
            counts = [len(st.points) for st in live]
            allpts = np.concatenate([st.points for st in live])
            res = lk_track_pyramids(pyr_prev, pyr_next, allpts, params)
            offsets = np.cumsum([0] + counts)
            for st, lo, hi in zip(live, offsets[:-1], offsets[1:]):
                tracked = res.tracked[lo:hi]
                newpos = res.new_positions[lo:hi]
                survive = (tracked
                           & (newpos[:, 0] >= st.region.x0)
                           & (newpos[:, 0] < st.region.x1)
                           & (newpos[:, 1] >= st.region.y0)
                           & (newpos[:, 1] < st.region.y1))
                if cfg.require_nonzero_flow:
                    disp = res.displacements[lo:hi]
                    survive &= (disp[:, 0] != 0.0) | (disp[:, 1] != 0.0)
                ratio = float(survive.sum()) / st.base_count
                st.ratios.append(ratio)
                if ratio < cfg.theta1:
                    st.boundary_indices.append(t)
                    st.sample(seq.frames[t], cfg)
                else:
                    st.points = newpos[survive]
        for st in streams:
            if len(st.ratios) < t:
                st.ratios.append(1.0)  # inert stream: nothing sampled
        pyr_prev = pyr_next
    return [PtStreamResult(st.region, st.boundary_indices,
                           np.asarray(st.ratios, dtype=np.float64))
            for st in streams]


def detect_pt_stream(seq: FrameSequence, region: PatchRect,
                     cfg: PtConfig | None = None) -> PtStreamResult:
    """Run a single region's causal stream; returns raw boundary transition
    indices (ascending) and the per-transition survival-ratio trace. Uses
    the same (cfg.seed, region.index) seed derivation as patchwise runs."""
    if cfg is None:
        cfg = PtConfig()
    return _run_streams(seq, [region], cfg, [mix_seed(cfg.seed, region.index)])[0]


def detect_pt_raw(seq: FrameSequence, grid: PatchGrid,
                  cfg: PtConfig | None = None) -> list[PtStreamResult]:
    """All per-patch streams; patch p uses the seed derived from
    (cfg.seed, p) so results do not depend on execution order."""
    if cfg is None:
        cfg = PtConfig()
    regions = list(grid.patches)
    seeds = [mix_seed(cfg.seed, r.index) for r in regions]
    return _run_streams(seq, regions, cfg, seeds)


def detect_pt(seq: FrameSequence, grid: PatchGrid, cfg: PtConfig | None = None,
              refine_boundaries: bool = True,
              refine_cfg: RefineConfig | None = None) -> BoundarySet:
    """Patchwise pixel-tracking detection: union of per-patch raw
    boundaries, converted to seconds, optionally refined."""
    results = detect_pt_raw(seq, grid, cfg)
    times: list[float] = []
    for r in results:
        times.extend(indices_to_timestamps(r.boundary_indices, seq.sample_fps))
    if refine_boundaries:
        ts = refine(times, refine_cfg)
    else:
        ts = sorted(set(times))
    return make_boundary_set(ts, seq.source_duration)
