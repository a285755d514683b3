"""Canonical annotation JSON validation.

Checks the schema invariants: a top-level "videos" list; per video a
string id, a positive duration, at least one annotator, and per annotator
an ascending list of timestamps strictly inside (0, duration).
"""

from __future__ import annotations

import json
from pathlib import Path


def validate_payload(payload) -> list[str]:
    problems: list[str] = []
    if not isinstance(payload, dict) or "videos" not in payload:
        return ['top level must be an object with a "videos" list']
    videos = payload["videos"]
    if not isinstance(videos, list):
        return ['"videos" must be a list']
    seen: set[str] = set()
    for i, v in enumerate(videos):
        where = f"videos[{i}]"
        if not isinstance(v, dict):
            problems.append(f"{where}: not an object")
            continue
        vid = v.get("video_id")
        if not isinstance(vid, str) or not vid:
            problems.append(f"{where}: missing or empty video_id")
            vid = f"<{i}>"
        elif vid in seen:
            problems.append(f"{where}: duplicate video_id {vid!r}")
        seen.add(vid)
        duration = v.get("duration_s")
        if not isinstance(duration, (int, float)) or isinstance(duration, bool) \
                or duration <= 0:
            problems.append(f"{vid}: duration_s must be a positive number")
            duration = None
        annotators = v.get("annotators")
        if not isinstance(annotators, list) or not annotators:
            problems.append(f"{vid}: needs a non-empty annotators list")
            continue
        for ai, bounds in enumerate(annotators):
            if not isinstance(bounds, list):
                problems.append(f"{vid}/annotator {ai}: not a list")
                continue
            prev = None
            for t in bounds:
                if isinstance(t, bool) or not isinstance(t, (int, float)):
                    problems.append(f"{vid}/annotator {ai}: non-numeric timestamp {t!r}")
                    continue
                if prev is not None and t < prev:
                    problems.append(f"{vid}/annotator {ai}: timestamps not ascending "
                                    f"({prev} then {t})")
                prev = t
                if duration is not None and not 0.0 < t < duration:
                    problems.append(f"{vid}/annotator {ai}: timestamp {t} outside "
                                    f"(0, {duration})")
    return problems


def validate_file(path: Path) -> list[str]:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as e:
        return [f"cannot read {path}: {e}"]
    except json.JSONDecodeError as e:
        return [f"{path} is not valid JSON: {e}"]
    return validate_payload(payload)
