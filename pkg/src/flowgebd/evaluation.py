"""F1 at relative-distance thresholds against multi-annotator ground truth.

A prediction matches a ground-truth boundary when |pred - gt| / duration is
strictly below tau; pairs are accepted greedily by ascending absolute
distance (ties bias to the earlier ground truth, then the earlier
prediction), one-to-one on both sides. Per video, scores are computed
against each annotator independently and reduced with `max` (default) or
`mean`; dataset scores micro-average the per-video representative counts.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .boundaries import BoundarySet, read_prediction
from .errors import EvalValidationError, FormatError

DEFAULT_TAUS = tuple(round(0.05 * k, 2) for k in range(1, 11))
DURATION_TOLERANCE = 0.02  # relative mismatch allowed between pred and annotation

ANNOTATOR_MODES = ("max", "mean")


@dataclass(frozen=True)
class VideoAnnotation:
    video_id: str
    duration_s: float
    annotators: tuple[tuple[float, ...], ...]

    def validate(self) -> list[str]:
        problems = []
        if self.duration_s <= 0:
            problems.append(f"{self.video_id}: duration must be positive")
        if not self.annotators:
            problems.append(f"{self.video_id}: needs at least one annotator")
        for ai, bounds in enumerate(self.annotators):
            if list(bounds) != sorted(bounds):
                problems.append(f"{self.video_id}/annotator {ai}: boundaries not sorted")
            for t in bounds:
                if not 0.0 < t < self.duration_s:
                    problems.append(
                        f"{self.video_id}/annotator {ai}: boundary {t} outside "
                        f"(0, {self.duration_s})")
        return problems


def read_annotations(path: Path) -> list[VideoAnnotation]:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as e:
        raise FormatError(f"cannot read annotation file {path}: {e}") from e
    try:
        videos = [
            VideoAnnotation(
                video_id=str(v["video_id"]),
                duration_s=float(v["duration_s"]),
                annotators=tuple(tuple(float(t) for t in ann)
                                 for ann in v["annotators"]))
            for v in payload["videos"]
        ]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
        raise FormatError(f"bad annotation file {path}: {e}") from e
    problems = [p for v in videos for p in v.validate()]
    if problems:
        raise FormatError(f"bad annotation file {path}: " + "; ".join(problems[:5]))
    return videos


def write_annotations(path: Path, videos: Sequence[VideoAnnotation]) -> None:
    payload = {"videos": [{"video_id": v.video_id,
                           "duration_s": v.duration_s,
                           "annotators": [list(a) for a in v.annotators]}
                          for v in videos]}
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def match_boundaries(preds: Sequence[float], gts: Sequence[float],
                     duration_s: float, tau: float) -> list[tuple[int, int]]:
    """Greedy one-to-one matching; returns (pred_index, gt_index) pairs
    sorted by prediction index."""
    if duration_s <= 0:
        raise EvalValidationError(f"duration must be positive, got {duration_s}")
    if tau <= 0:
        raise EvalValidationError(f"tau must be positive, got {tau}")
    candidates: list[tuple[float, int, int]] = []
    limit = tau * duration_s
    for gi, g in enumerate(gts):
        for pi, p in enumerate(preds):
            d = abs(p - g)
            if d < limit:
                candidates.append((d, gi, pi))
    candidates.sort()
    used_p: set[int] = set()
    used_g: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for _, gi, pi in candidates:
        if pi not in used_p and gi not in used_g:
            pairs.append((pi, gi))
            used_p.add(pi)
            used_g.add(gi)
    pairs.sort()
    return pairs


def _prf(matched: float, n_pred: float, n_gt: float) -> tuple[float, float, float]:
    p = matched / n_pred if n_pred > 0 else 0.0
    r = matched / n_gt if n_gt > 0 else 0.0
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f1


@dataclass
class TauScore:
    tau: float
    precision: float
    recall: float
    f1: float
    # representative counts feeding the dataset micro-average (fractional
    # under mean annotator reduction)
    matched: float
    predicted: float
    ground_truth: float


def score_video(preds: BoundarySet, ann: VideoAnnotation,
                taus: Sequence[float] = DEFAULT_TAUS,
                annotator_mode: str = "max") -> list[TauScore]:
    if annotator_mode not in ANNOTATOR_MODES:
        raise EvalValidationError(f"annotator_mode must be one of {ANNOTATOR_MODES}")
    if abs(preds.video_duration - ann.duration_s) > DURATION_TOLERANCE * ann.duration_s:
        raise EvalValidationError(
            f"{ann.video_id}: prediction duration {preds.video_duration} "
            f"vs annotation {ann.duration_s} differ by more than "
            f"{DURATION_TOLERANCE:.0%}")
    pred_times = list(preds.timestamps)
    out: list[TauScore] = []
    for tau in taus:
        per_ann = []
        for gts in ann.annotators:
            matched = len(match_boundaries(pred_times, gts, ann.duration_s, tau))
            per_ann.append((matched, len(pred_times), len(gts)))
        if annotator_mode == "max":
            best = max(range(len(per_ann)),
                       key=lambda i: (_prf(*per_ann[i])[2], -i))
            m, np_, ng = per_ann[best]
            p, r, f1 = _prf(m, np_, ng)
            out.append(TauScore(tau, p, r, f1, m, np_, ng))
        else:
            n = len(per_ann)
            prfs = [_prf(*c) for c in per_ann]
            p = sum(v[0] for v in prfs) / n
            r = sum(v[1] for v in prfs) / n
            f1 = sum(v[2] for v in prfs) / n
            out.append(TauScore(tau, p, r, f1,
                                sum(c[0] for c in per_ann) / n,
                                sum(c[1] for c in per_ann) / n,
                                sum(c[2] for c in per_ann) / n))
    return out


@dataclass
class EvalReport:
    taus: list[float]
    precision: list[float]
    recall: list[float]
    f1: list[float]
    avg_f1: float
    counts: list[tuple[float, float, float]]  # per tau: matched/predicted/gt
    per_video: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "taus": self.taus,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "avg_f1": self.avg_f1,
            "counts": [{"tau": t, "matched": c[0], "predicted": c[1],
                        "ground_truth": c[2]}
                       for t, c in zip(self.taus, self.counts)],
            "warnings": self.warnings,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def write_csv(self, path: Path) -> None:
        cols = [f"tau_{t:.2f}" for t in self.taus]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["metric"] + cols + ["avg"])
            w.writerow(["precision"] + [f"{v:.6f}" for v in self.precision]
                       + [f"{sum(self.precision) / len(self.precision):.6f}"])
            w.writerow(["recall"] + [f"{v:.6f}" for v in self.recall]
                       + [f"{sum(self.recall) / len(self.recall):.6f}"])
            w.writerow(["f1"] + [f"{v:.6f}" for v in self.f1]
                       + [f"{self.avg_f1:.6f}"])

    def write_per_video_csv(self, path: Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["video_id", "tau", "precision", "recall", "f1",
                        "matched", "predicted", "ground_truth"])
            for row in self.per_video:
                for s in row["scores"]:
                    w.writerow([row["video_id"], f"{s.tau:.2f}",
                                f"{s.precision:.6f}", f"{s.recall:.6f}",
                                f"{s.f1:.6f}", s.matched, s.predicted,
                                s.ground_truth])


def evaluate_dataset(pred_dir: Path, annot_file: Path,
                     taus: Sequence[float] = DEFAULT_TAUS,
                     annotator_mode: str = "max") -> EvalReport:
    """Score every annotated video against `<pred_dir>/<video_id>.json`;
    missing predictions count as empty (with a warning)."""
    annotations = read_annotations(annot_file)
    pred_dir = Path(pred_dir)
    warnings: list[str] = []
    totals = [[0.0, 0.0, 0.0] for _ in taus]
    per_video: list[dict] = []
    for ann in annotations:
        pred_path = pred_dir / f"{ann.video_id}.json"
        if pred_path.exists():
            pred = read_prediction(pred_path)
            bset = BoundarySet(tuple(pred.boundaries_s), pred.duration_s)
        else:
            warnings.append(f"no prediction for {ann.video_id}; scored as empty")
            bset = BoundarySet((), ann.duration_s)
        scores = score_video(bset, ann, taus, annotator_mode)
        per_video.append({"video_id": ann.video_id, "scores": scores})
        for i, s in enumerate(scores):
            totals[i][0] += s.matched
            totals[i][1] += s.predicted
            totals[i][2] += s.ground_truth
    precision, recall, f1 = [], [], []
    for m, np_, ng in totals:
        p, r, f = _prf(m, np_, ng)
        precision.append(p)
        recall.append(r)
        f1.append(f)
    return EvalReport(taus=list(taus), precision=precision, recall=recall,
                      f1=f1, avg_f1=sum(f1) / len(f1),
                      counts=[tuple(t) for t in totals],
                      per_video=per_video, warnings=warnings)
