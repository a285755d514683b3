"""Convert dataset annotation pickles to the canonical JSON schema:

    {"videos": [{"video_id": str, "duration_s": float,
                 "annotators": [[float, ...], ...]}, ...]}

Supported inputs:
  * kinetics-gebd: a dict mapping video_id -> record; the record's duration
    and per-annotator timestamp lists are discovered from a small set of
    known field spellings (see _DURATION_KEYS / _TIMESTAMP_KEYS).
  * tapos: a dict mapping video_id -> {instance_id -> record}; every
    instance becomes an independent video "<video_id>_<instance_id>". A
    record either carries sub-stage frame indices plus an fps field
    (boundaries and the instance duration are measured from the instance
    start) or ready-made timestamps plus a duration.

Field names in published pickles drift between releases, so discovery is
defensive: an unrecognized record structure raises instead of guessing.

Timestamps at or beyond the video duration are clamped to just inside it
(dataset noise; warned, loudly when the excess is over 0.05 s); timestamps
at or below zero are dropped with a warning. In-range timestamps are
serialized losslessly (shortest round-trip decimal form).
"""

from __future__ import annotations

import json
import pickle
from dataclasses import dataclass, field
from pathlib import Path

DATASETS = ("kinetics-gebd", "tapos")

_DURATION_KEYS = ("video_duration", "duration", "duration_s", "video_duration_s")
_TIMESTAMP_KEYS = ("substages_timestamps", "change_timestamps",
                   "boundary_timestamps", "annotations")
_FRAME_INDEX_KEYS = ("substages", "substages_myframeidx", "subactions")
_FPS_KEYS = ("fps", "myfps", "frame_rate")
_CLAMP_EPS = 1e-6
_NOISE_BUDGET = 0.05  # seconds of overshoot considered ordinary dataset noise


class ConversionError(ValueError):
    pass


@dataclass
class ConversionResult:
    videos: list[dict]
    warnings: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    def payload(self) -> dict:
        return {"videos": self.videos}


def _first_key(record: dict, names: tuple[str, ...]):
    for name in names:
        if name in record:
            return name
    return None


def _as_float_list(value, where: str) -> list[float]:
    if not isinstance(value, (list, tuple)):
        raise ConversionError(f"{where}: expected a list, got {type(value).__name__}")
    out = []
    for v in value:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConversionError(
                f"{where}: expected numeric timestamps, got {type(v).__name__}")
        out.append(float(v))
    return out


def _sanitize(times: list[float], duration: float, video_id: str,
              warnings: list[str]) -> list[float]:
    out = []
    for t in times:
        if t <= 0.0:
            warnings.append(f"{video_id}: dropped non-positive timestamp {t!r}")
            continue
        if t >= duration:
            excess = t - duration
            level = "noise" if excess < _NOISE_BUDGET else "LARGE excess"
            warnings.append(f"{video_id}: clamped timestamp {t!r} to just under "
                            f"duration {duration!r} ({level}, +{excess:.6f}s)")
            t = duration - _CLAMP_EPS
        out.append(t)
    return sorted(out)


def _convert_kinetics(data: dict) -> ConversionResult:
    result = ConversionResult(videos=[])
    for video_id in sorted(data, key=str):
        record = data[video_id]
        if not isinstance(record, dict):
            raise ConversionError(f"{video_id}: record is {type(record).__name__}, "
                                  "expected a dict")
        dkey = _first_key(record, _DURATION_KEYS)
        tkey = _first_key(record, _TIMESTAMP_KEYS)
        if dkey is None or tkey is None:
            raise ConversionError(
                f"{video_id}: cannot find duration/timestamp fields; "
                f"record has keys {sorted(record)}")
        duration = float(record[dkey])
        if duration <= 0:
            result.warnings.append(f"{video_id}: skipped, non-positive duration")
            result.skipped.append(str(video_id))
            continue
        raw = record[tkey]
        if not isinstance(raw, (list, tuple)):
            raise ConversionError(f"{video_id}.{tkey}: expected a list of "
                                  "per-annotator lists")
        annotators = []
        for ai, one in enumerate(raw):
            times = _as_float_list(one, f"{video_id}.{tkey}[{ai}]")
            annotators.append(_sanitize(times, duration, str(video_id),
                                        result.warnings))
        if not annotators:
            result.warnings.append(f"{video_id}: skipped, empty annotator list")
            result.skipped.append(str(video_id))
            continue
        result.videos.append({"video_id": str(video_id),
                              "duration_s": duration,
                              "annotators": annotators})
    return result


def _convert_tapos_record(video_id: str, instance_id: str, record: dict,
                          result: ConversionResult) -> None:
    name = f"{video_id}_{instance_id}"
    fkey = _first_key(record, _FRAME_INDEX_KEYS)
    if fkey is not None:
        pkey = _first_key(record, _FPS_KEYS)
        if pkey is None:
            raise ConversionError(f"{name}: has {fkey!r} but no fps field; "
                                  f"record keys {sorted(record)}")
        fps = float(record[pkey])
        if fps <= 0:
            raise ConversionError(f"{name}: non-positive fps {fps}")
        stages = _as_float_list(record[fkey], f"{name}.{fkey}")
        if len(stages) < 2 or stages != sorted(stages):
            raise ConversionError(f"{name}.{fkey}: need ascending stage marks, "
                                  f"got {stages}")
        start = stages[0]
        duration = (stages[-1] - start) / fps
        if duration <= 0:
            result.warnings.append(f"{name}: skipped, zero-length instance")
            result.skipped.append(name)
            return
        times = [(s - start) / fps for s in stages[1:-1]]
    else:
        tkey = _first_key(record, _TIMESTAMP_KEYS)
        dkey = _first_key(record, _DURATION_KEYS)
        if tkey is None or dkey is None:
            raise ConversionError(f"{name}: unrecognized record structure; "
                                  f"keys {sorted(record)}")
        duration = float(record[dkey])
        if duration <= 0:
            result.warnings.append(f"{name}: skipped, non-positive duration")
            result.skipped.append(name)
            return
        times = _as_float_list(record[tkey], f"{name}.{tkey}")
    result.videos.append({
        "video_id": name,
        "duration_s": duration,
        "annotators": [_sanitize(times, duration, name, result.warnings)],
    })


def _convert_tapos(data: dict) -> ConversionResult:
    result = ConversionResult(videos=[])
    for video_id in sorted(data, key=str):
        instances = data[video_id]
        if not isinstance(instances, dict):
            raise ConversionError(f"{video_id}: expected a dict of instances, "
                                  f"got {type(instances).__name__}")
        for instance_id in sorted(instances, key=str):
            record = instances[instance_id]
            if not isinstance(record, dict):
                raise ConversionError(
                    f"{video_id}/{instance_id}: instance record is "
                    f"{type(record).__name__}, expected a dict")
            _convert_tapos_record(str(video_id), str(instance_id), record, result)
    return result


def convert(data: dict, dataset: str) -> ConversionResult:
    if dataset not in DATASETS:
        raise ConversionError(f"dataset must be one of {DATASETS}, got {dataset!r}")
    if not isinstance(data, dict):
        raise ConversionError(f"top-level pickle object is {type(data).__name__}, "
                              "expected a dict keyed by video id")
    if dataset == "kinetics-gebd":
        return _convert_kinetics(data)
    return _convert_tapos(data)


def write_canonical(payload: dict, out_path: Path) -> None:
    Path(out_path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def convert_file(pickle_path: Path, dataset: str, out_path: Path) -> ConversionResult:
    with open(pickle_path, "rb") as fh:
        data = pickle.load(fh)
    result = convert(data, dataset)
    write_canonical(result.payload(), out_path)
    return result
