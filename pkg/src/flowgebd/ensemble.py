"""Combined detection: union of raw pixel-tracking and flow-normalization
boundaries, refined once over the joint multiset."""

from __future__ import annotations

from .boundaries import (BoundarySet, RefineConfig, indices_to_timestamps,
                         make_boundary_set, refine)
from .flow_norm import FnConfig, detect_fn_raw
from .frames import FrameSequence
from .grid import PatchGrid
from .pixel_tracking import PtConfig, detect_pt_raw


def ensemble(seq: FrameSequence, grid: PatchGrid,
             pt_cfg: PtConfig | None = None,
             fn_cfg: FnConfig | None = None,
             refine_cfg: RefineConfig | None = None) -> BoundarySet:
    """Both detectors run unrefined; their timestamp multisets are merged
    and refined together, so agreeing detections collapse to one boundary
    and isolated single-detector boundaries survive as singletons."""
    pt_results = detect_pt_raw(seq, grid, pt_cfg)
    fn_raw = detect_fn_raw(seq, grid, fn_cfg)
    times: list[float] = []
    for r in pt_results:
        times.extend(indices_to_timestamps(r.boundary_indices, seq.sample_fps))
    for indices in fn_raw:
        times.extend(indices_to_timestamps(indices, seq.sample_fps))
    return make_boundary_set(refine(times, refine_cfg), seq.source_duration)
