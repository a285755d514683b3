"""Command-line interface: detect / eval / sweep / synth.

Exit codes: 0 success, 1 runtime failure, 2 usage error. The environment
variable FLOWGEBD_THREADS overrides --threads.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .boundaries import Prediction, RefineConfig, indices_to_timestamps, refine
from .ensemble import ensemble
from .errors import ConfigError, FlowGEBDError, FormatError
from .evaluation import (DEFAULT_TAUS, VideoAnnotation, evaluate_dataset,
                         match_boundaries, read_annotations)
from .flow_norm import (FnConfig, detect_fn, dump_series_csv,
                        patchflow_series, series_boundary_indices)
from .frames import SourceSpec, load_sequence, source_from_path
from .grid import make_grid
from .pixel_tracking import PtConfig, detect_pt, detect_pt_raw
from .synth import SynthSpec, generate

log = logging.getLogger("flowgebd")

MODES = ("pt", "fn", "ensemble")


def _threads(args) -> int:
    env = os.environ.get("FLOWGEBD_THREADS")
    if env:
        return max(1, int(env))
    if args.threads:
        return max(1, args.threads)
    return os.cpu_count() or 1


def _grid_dims(args) -> tuple[int, int]:
    if args.grid:
        try:
            a, b = args.grid.lower().split("x")
            return int(a), int(b)
        except ValueError as e:
            raise ConfigError(f"--grid expects WxH, got {args.grid!r}") from e
    return args.grid_n, args.grid_n


def _configs(args) -> tuple[PtConfig, FnConfig, RefineConfig]:
    pt = PtConfig(theta1=args.theta1, sampler=args.sampler, seed=args.seed)
    fn = FnConfig(theta2=args.theta2)
    rc = RefineConfig(theta3=args.theta3)
    pt.validate()
    fn.validate()
    rc.validate()
    return pt, fn, rc


@dataclass
class _Job:
    video_id: str
    spec: SourceSpec


def _detect_one(job: _Job, args, pt: PtConfig, fn: FnConfig,
                rc: RefineConfig) -> Path:
    seq = load_sequence(job.spec, args.fps, (args.size, args.size))
    n_w, n_h = _grid_dims(args)
    grid = make_grid(seq.width, seq.height, n_w, n_h,
                     include_centroidal=not args.base_only)
    if args.mode == "pt":
        bset = detect_pt(seq, grid, pt, refine_boundaries=True, refine_cfg=rc)
    elif args.mode == "fn":
        bset = detect_fn(seq, grid, fn, refine_boundaries=True, refine_cfg=rc)
    else:
        bset = ensemble(seq, grid, pt, fn, rc)
    if args.series_dump:
        dump_series_csv(patchflow_series(seq, grid, fn),
                        Path(args.out) / f"{job.video_id}_series.csv")
    cfg_echo = {
        "mode": args.mode, "grid_n_w": n_w, "grid_n_h": n_h,
        "centroidal": not args.base_only, "theta1": pt.theta1,
        "theta2": fn.theta2, "theta3": rc.theta3, "sampler": pt.sampler,
        "seed": pt.seed, "fps": args.fps, "size": args.size,
    }
    pred = Prediction(video_id=job.video_id, sample_fps=seq.sample_fps,
                      duration_s=seq.source_duration, method=args.mode,
                      boundaries_s=list(bset.timestamps), config=cfg_echo)
    return pred.write(Path(args.out))


def _load_batch(path: Path) -> list[_Job]:
    try:
        payload = json.loads(path.read_text())
        jobs = []
        for v in payload["videos"]:
            fps = float(v["native_fps"]) if "native_fps" in v else None
            jobs.append(_Job(str(v["video_id"]),
                             source_from_path(v["path"], fps)))
        return jobs
    except (KeyError, ValueError, json.JSONDecodeError) as e:
        raise FormatError(f"bad batch manifest {path}: {e}") from e


def cmd_detect(args) -> int:
    Path(args.out).mkdir(parents=True, exist_ok=True)
    pt, fn, rc = _configs(args)
    if args.batch:
        jobs = _load_batch(Path(args.batch))
    else:
        if not args.input:
            raise ConfigError("detect needs --input or --batch")
        spec = source_from_path(args.input, args.fps_native)
        vid = args.video_id or Path(args.input).stem or Path(args.input).name
        jobs = [_Job(vid, spec)]
    failures = 0
    workers = _threads(args)
    if workers == 1 or len(jobs) == 1:
        for job in jobs:
            try:
                out = _detect_one(job, args, pt, fn, rc)
                log.info("wrote %s", out)
            except (FlowGEBDError, OSError) as e:
                log.error("%s failed: %s", job.video_id, e)
                failures += 1
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = {pool.submit(_detect_one, job, args, pt, fn, rc): job
                    for job in jobs}
            for fut, job in futs.items():
                try:
                    log.info("wrote %s", fut.result())
                except (FlowGEBDError, OSError) as e:
                    log.error("%s failed: %s", job.video_id, e)
                    failures += 1
    return 1 if failures else 0


def _parse_taus(text: str) -> list[float]:
    try:
        taus = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise ConfigError(f"bad --taus {text!r}") from e
    if not taus or any(t <= 0 for t in taus):
        raise ConfigError(f"--taus must be positive, got {text!r}")
    return taus


def cmd_eval(args) -> int:
    taus = _parse_taus(args.taus) if args.taus else list(DEFAULT_TAUS)
    report = evaluate_dataset(Path(args.preds), Path(args.annotations),
                              taus, args.annotator_mode)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json())
    report.write_csv(out / "report.csv")
    report.write_per_video_csv(out / "per_video.csv")
    for wmsg in report.warnings:
        log.warning("%s", wmsg)
    print(f"avg F1 over taus: {report.avg_f1:.4f}; "
          + " ".join(f"F1@{t:.2f}={f:.4f}" for t, f in zip(report.taus, report.f1)))
    return 0


def _parse_range(text: str) -> list[float]:
    """start:step:end inclusive of the end within float slack."""
    try:
        start, step, end = (float(v) for v in text.split(":"))
    except ValueError as e:
        raise ConfigError(f"range must be start:step:end, got {text!r}") from e
    if step <= 0 or end < start:
        raise ConfigError(f"bad range {text!r}")
    vals = []
    v = start
    while v <= end + 1e-9:
        vals.append(round(v, 6))
        v += step
    return vals


def _collect_corpus(corpus: Path, fps_native: float | None) -> list[tuple[VideoAnnotation, SourceSpec]]:
    items = []
    for sub in sorted(Path(corpus).iterdir()):
        ann_file = sub / "annotation.json"
        if not sub.is_dir() or not ann_file.exists():
            continue
        anns = read_annotations(ann_file)
        if len(anns) != 1:
            raise FormatError(f"{ann_file} must describe exactly one video")
        ann = anns[0]
        spec = source_from_path(sub, fps_native)
        if spec.kind == "image-dir" and spec.native_fps is None:
            count = len([p for p in sub.iterdir() if p.suffix.lower() in (".pgm", ".png")])
            spec = SourceSpec(spec.kind, spec.path, count / ann.duration_s)
        items.append((ann, spec))
    if not items:
        raise FormatError(f"no annotated videos under {corpus}")
    return items


def cmd_sweep(args) -> int:
    theta1s = _parse_range(args.theta1)
    theta2s = _parse_range(args.theta2)
    theta3s = _parse_range(args.theta3)
    modes = MODES if args.mode == "all" else (args.mode,)
    n_w, n_h = _grid_dims(args)
    corpus = _collect_corpus(Path(args.corpus), args.fps_native)
    tau = args.tau

    # per video: flow-normalization series once (threshold independent),
    # pixel tracking per theta1 (resampling couples the stream to theta1)
    per_video = []
    for ann, spec in corpus:
        seq = load_sequence(spec, args.fps, (args.size, args.size))
        grid = make_grid(seq.width, seq.height, n_w, n_h,
                         include_centroidal=not args.base_only)
        series = patchflow_series(seq, grid, FnConfig())
        pt_times = {}
        for t1 in theta1s:
            cfg = PtConfig(theta1=t1, sampler=args.sampler, seed=args.seed)
            results = detect_pt_raw(seq, grid, cfg)
            times = []
            for r in results:
                times.extend(indices_to_timestamps(r.boundary_indices, seq.sample_fps))
            pt_times[t1] = times
        per_video.append((ann, seq, series, pt_times))
        log.info("prepared %s", ann.video_id)

    rows = []
    for t2 in theta2s:
        fn_times_cache = []
        for ann, seq, series, _ in per_video:
            times = []
            for s in series:
                times.extend(indices_to_timestamps(
                    series_boundary_indices(s.values, t2), seq.sample_fps))
            fn_times_cache.append(times)
        for t1 in theta1s:
            for t3 in theta3s:
                for mode in modes:
                    matched = pred_n = gt_n = 0
                    for (ann, seq, _, pt_times), fn_times in zip(per_video, fn_times_cache):
                        if mode == "pt":
                            raw = pt_times[t1]
                        elif mode == "fn":
                            raw = fn_times
                        else:
                            raw = pt_times[t1] + fn_times
                        preds = refine(raw, RefineConfig(theta3=t3))
                        gts = ann.annotators[0]
                        matched += len(match_boundaries(preds, gts, ann.duration_s, tau))
                        pred_n += len(preds)
                        gt_n += len(gts)
                    p = matched / pred_n if pred_n else 0.0
                    r = matched / gt_n if gt_n else 0.0
                    f1 = 2 * p * r / (p + r) if p + r else 0.0
                    rows.append((t1, t2, t3, mode, f1))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        fh.write("theta1,theta2,theta3,mode,f1@%.2f\n" % tau)
        for t1, t2, t3, mode, f1 in sorted(rows, key=lambda r: (r[3], r[0], r[1], r[2])):
            fh.write(f"{t1},{t2},{t3},{mode},{f1:.6f}\n")
    log.info("wrote %s (%d rows)", out, len(rows))
    return 0


def cmd_synth(args) -> int:
    events = tuple(float(e) for e in args.events.split(",")) if args.events else ()
    spec = SynthSpec(kind=args.kind, duration_s=args.duration, fps=args.fps,
                     size=(args.size, args.size), events=events,
                     texture_seed=args.seed)
    ann = generate(spec, Path(args.out), args.video_id)
    log.info("wrote %d frames + annotation for %s under %s",
             int(round(args.duration * args.fps)), ann.video_id, args.out)
    return 0


def _add_common_detect_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fps", type=float, default=4.0, help="analysis frame rate")
    p.add_argument("--size", type=int, default=160, help="analysis frame side")
    p.add_argument("--grid-n", type=int, default=5, help="square grid count")
    p.add_argument("--grid", help="rectangular grid as WxH, overrides --grid-n")
    p.add_argument("--base-only", action="store_true",
                   help="drop centroidal patches (ablation)")
    p.add_argument("--sampler", choices=("uniform-random", "shi-tomasi"),
                   default="uniform-random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fps-native", type=float, default=None,
                   help="source frame rate (image dirs / raw yuv)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flowgebd",
                                 description="Optical-flow event boundary "
                                             "detection, evaluation and synthesis")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="detect boundaries and write prediction JSON")
    d.add_argument("--mode", choices=MODES, required=True)
    d.add_argument("--input", help="video source: frame dir, .y4m, or raw .yuv")
    d.add_argument("--video-id", help="output id (default: input name)")
    d.add_argument("--batch", help="JSON manifest {videos:[{video_id,path,native_fps}]}")
    d.add_argument("--out", required=True, help="output directory")
    d.add_argument("--theta1", type=float, default=0.4)
    d.add_argument("--theta2", type=float, default=0.25)
    d.add_argument("--theta3", type=float, default=0.5)
    d.add_argument("--threads", type=int, default=0,
                   help="parallel videos in batch mode (default: cores)")
    d.add_argument("--series-dump", action="store_true",
                   help="also write per-patch flow series CSV")
    _add_common_detect_args(d)
    d.set_defaults(func=cmd_detect)

    e = sub.add_parser("eval", help="score predictions against annotations")
    e.add_argument("--preds", required=True, help="directory of <video_id>.json")
    e.add_argument("--annotations", required=True, help="canonical annotation JSON")
    e.add_argument("--out", required=True, help="report output directory")
    e.add_argument("--annotator-mode", choices=("max", "mean"), default="max")
    e.add_argument("--taus", help="comma list, default 0.05..0.50")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", help="threshold sensitivity grid over a labeled corpus")
    s.add_argument("--corpus", required=True,
                   help="directory of per-video frame dirs with annotation.json")
    s.add_argument("--out", required=True, help="CSV output path")
    s.add_argument("--mode", choices=MODES + ("all",), default="all")
    s.add_argument("--theta1", default="0.1:0.1:0.9", help="start:step:end")
    s.add_argument("--theta2", default="0.1:0.1:0.9", help="start:step:end")
    s.add_argument("--theta3", default="0.5:0.5:3.0", help="start:step:end")
    s.add_argument("--tau", type=float, default=0.05, help="Rel.Dis. threshold to report")
    _add_common_detect_args(s)
    s.set_defaults(func=cmd_sweep)

    y = sub.add_parser("synth", help="generate a synthetic labeled video")
    y.add_argument("--kind", choices=("scene-cut", "motion-onset", "moving-dot", "static"),
                   required=True)
    y.add_argument("--duration", type=float, default=10.0)
    y.add_argument("--fps", type=float, default=4.0)
    y.add_argument("--size", type=int, default=160)
    y.add_argument("--events", help="comma-separated seconds")
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--video-id")
    y.add_argument("--out", required=True)
    y.set_defaults(func=cmd_synth)
    return ap


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FlowGEBDError as e:
        log.error("%s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
