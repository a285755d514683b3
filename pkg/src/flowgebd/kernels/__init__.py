"""Self-contained optical-flow kernels: corner scoring, pixel sampling,
pyramidal sparse tracking, and dense polynomial-expansion flow."""

from .corners import min_eigenvalue_map, shi_tomasi_corners
from .farneback import (ExpansionPyramid, expand_pyramid, farneback_flow,
                        flow_from_expansions, max_flow_magnitude)
from .lk import SparseFlowResult, lk_track, lk_track_pyramids
from .params import FarnebackParams, FlowParams
from .pyramid import TrackPyramid, build_track_pyramid
from .resize import resize_bilinear, resize_bilinear_u8
from .sampling import mix_seed, sample_uniform

__all__ = [
    "ExpansionPyramid",
    "FarnebackParams",
    "FlowParams",
    "SparseFlowResult",
    "TrackPyramid",
    "build_track_pyramid",
    "expand_pyramid",
    "farneback_flow",
    "flow_from_expansions",
    "lk_track",
    "lk_track_pyramids",
    "max_flow_magnitude",
    "min_eigenvalue_map",
    "mix_seed",
    "resize_bilinear",
    "resize_bilinear_u8",
    "sample_uniform",
    "shi_tomasi_corners",
]
