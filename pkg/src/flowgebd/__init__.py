"""FlowGEBD: non-parametric event-boundary detection from optical flow."""

from .boundaries import (BoundarySet, Prediction, RefineConfig,
                         indices_to_timestamps, make_boundary_set,
                         read_prediction, refine)
from .ensemble import ensemble
from .errors import ConfigError, EvalValidationError, FlowGEBDError, FormatError
from .evaluation import (DEFAULT_TAUS, EvalReport, VideoAnnotation,
                         evaluate_dataset, match_boundaries, read_annotations,
                         score_video, write_annotations)
from .flow_norm import (FnConfig, PatchFlowSeries, detect_fn, detect_fn_raw,
                        normalize_series, patchflow_series,
                        series_boundary_indices)
from .frames import (FrameSequence, LoadedSource, RawGeometry, SourceSpec,
                     load_frames, load_sequence, preprocess, read_pgm,
                     rgb_to_luma, source_from_path, write_pgm)
from .grid import PatchGrid, PatchRect, extract_patch, make_grid
from .kernels import (FarnebackParams, FlowParams, SparseFlowResult,
                      farneback_flow, lk_track, max_flow_magnitude,
                      min_eigenvalue_map, sample_uniform, shi_tomasi_corners)
from .pixel_tracking import PtConfig, PtStreamResult, detect_pt, detect_pt_raw, detect_pt_stream
from .synth import SynthSpec, generate, generate_sequence, sample_event_times, smoothed_noise

__version__ = "0.1.0"

__all__ = [
    "BoundarySet", "ConfigError", "DEFAULT_TAUS", "EvalReport",
    "EvalValidationError", "FarnebackParams", "FlowGEBDError", "FlowParams",
    "FnConfig", "FormatError", "FrameSequence", "LoadedSource",
    "PatchFlowSeries", "PatchGrid", "PatchRect", "Prediction", "PtConfig",
    "PtStreamResult", "RawGeometry", "RefineConfig", "SourceSpec",
    "SparseFlowResult", "SynthSpec", "VideoAnnotation", "detect_fn",
    "detect_fn_raw", "detect_pt", "detect_pt_raw", "detect_pt_stream",
    "ensemble", "evaluate_dataset", "extract_patch", "farneback_flow",
    "generate", "generate_sequence", "indices_to_timestamps", "lk_track",
    "load_frames", "load_sequence", "make_boundary_set", "make_grid",
    "match_boundaries", "max_flow_magnitude", "min_eigenvalue_map",
    "normalize_series", "patchflow_series", "preprocess", "read_annotations",
    "read_pgm", "read_prediction", "refine", "rgb_to_luma",
    "sample_event_times", "sample_uniform", "score_video",
    "series_boundary_indices", "shi_tomasi_corners", "smoothed_noise",
    "source_from_path", "write_annotations", "write_pgm",
]
