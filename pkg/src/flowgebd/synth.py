"""Deterministic synthetic videos with exact ground-truth boundaries.

Kinds:
  * scene-cut:    independent smoothed-noise textures per segment, cut at
                  the event frames.
  * motion-onset: static background; a textured block performs a short
                  translation burst (2 transitions at 2 px/frame) starting
                  at each event frame, then rests at its new position.
  * moving-dot:   the block oscillates continuously inside one base patch
                  of the canonical 5x5 layout; no boundaries.
  * static:       identical frames; no boundaries.

Event times snap to the frame grid, so the annotation is exact by
construction: each event time is first-changed-frame-index / fps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .evaluation import VideoAnnotation, write_annotations
from .frames import FrameSequence, write_pgm

KINDS = ("scene-cut", "motion-onset", "moving-dot", "static")
BLOCK_SIDE = 24
BLOCK_STEP = 2          # px per frame while a block is translating
BURST_TRANSITIONS = 2   # moved frames per motion-onset event
MIN_EVENT_GAP = 1.0     # seconds


@dataclass(frozen=True)
class SynthSpec:
    kind: str
    duration_s: float = 10.0
    fps: float = 4.0
    size: tuple[int, int] = (160, 160)   # (width, height)
    events: tuple[float, ...] = ()
    texture_seed: int = 0

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.fps < 2:
            raise ConfigError(f"fps must be >= 2, got {self.fps}")
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be positive")
        if self.kind in ("moving-dot", "static") and self.events:
            raise ConfigError(f"{self.kind} videos cannot carry events")
        prev = None
        for e in self.events:
            if not 0.0 < e < self.duration_s:
                raise ConfigError(f"event {e} outside (0, {self.duration_s})")
            if prev is not None and e - prev < MIN_EVENT_GAP:
                raise ConfigError(f"events {prev} and {e} closer than {MIN_EVENT_GAP} s")
            prev = e


def smoothed_noise(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    """I.i.d. uniform bytes, one 3x3 box pass (replicate edges); raw white
    noise defeats window-based flow, one pass leaves segments decorrelated."""
    raw = rng.integers(0, 256, size=(height, width)).astype(np.float64)
    p = np.pad(raw, 1, mode="edge")
    s = sum(p[dy:dy + height, dx:dx + width] for dy in range(3) for dx in range(3)) / 9.0
    return np.floor(s + 0.5).astype(np.uint8)


def sample_event_times(rng: np.random.Generator, duration_s: float, fps: float,
                       count: int, min_gap_s: float = MIN_EVENT_GAP,
                       margin_s: float = 1.0) -> tuple[float, ...]:
    """Draw `count` frame-aligned event times with pairwise gaps of at least
    min_gap_s, keeping margin_s clear of both ends."""
    total = int(round(duration_s * fps))
    lo = max(1, int(math.ceil(margin_s * fps)))
    hi = min(total - 1, int(math.floor((duration_s - margin_s) * fps)))
    gap = int(math.ceil(min_gap_s * fps))
    for _ in range(1000):
        picks = sorted(rng.choice(np.arange(lo, hi + 1), size=count, replace=False))
        if all(b - a >= gap for a, b in zip(picks, picks[1:])):
            return tuple(round(int(k) / fps, 6) for k in picks)
    raise ConfigError(f"cannot place {count} events {min_gap_s}s apart in "
                      f"{duration_s}s at {fps} fps")


def _event_indices(spec: SynthSpec, total: int) -> list[int]:
    idx = sorted({int(round(e * spec.fps)) for e in spec.events})
    return [k for k in idx if 1 <= k <= total - 1]


def _paste(frame: np.ndarray, block: np.ndarray, x: int, y: int) -> None:
    frame[y:y + block.shape[0], x:x + block.shape[1]] = block


def generate_sequence(spec: SynthSpec) -> tuple[FrameSequence, tuple[float, ...]]:
    """Render the frames in memory; returns the sequence and the snapped
    ground-truth event times."""
    spec.validate()
    w, h = spec.size
    total = int(round(spec.duration_s * spec.fps))
    if total < 2:
        raise ConfigError("spec yields fewer than 2 frames")
    rng = np.random.default_rng(spec.texture_seed)
    events = _event_indices(spec, total)
    frames = np.empty((total, h, w), dtype=np.uint8)

    if spec.kind == "static":
        frames[:] = smoothed_noise(rng, h, w)

    elif spec.kind == "scene-cut":
        bounds = [0] + events + [total]
        for seg in range(len(bounds) - 1):
            frames[bounds[seg]:bounds[seg + 1]] = smoothed_noise(rng, h, w)

    elif spec.kind in ("motion-onset", "moving-dot"):
        background = smoothed_noise(rng, h, w)
        block = smoothed_noise(rng, BLOCK_SIDE, BLOCK_SIDE)
        if spec.kind == "moving-dot":
            cell_w, cell_h = w // 5, h // 5
            slack = cell_w - BLOCK_SIDE
            if slack < BLOCK_STEP:
                raise ConfigError(f"frame {w}x{h} too small for a moving dot")
            ci = int(rng.integers(0, 5))
            cj = int(rng.integers(0, 5))
            x0, y0 = ci * cell_w, cj * cell_h
            period = 2 * slack
            xs = []
            for i in range(total):
                phase = (i * BLOCK_STEP) % period
                xs.append(x0 + (phase if phase <= slack else period - phase))
            for i in range(total):
                frames[i] = background
                _paste(frames[i], block, xs[i], y0)
        else:
            travel = BLOCK_STEP * BURST_TRANSITIONS
            max_travel = travel * max(1, len(events))
            margin = 4
            px = int(rng.integers(margin, max(margin + 1, w - BLOCK_SIDE - margin - max_travel)))
            py = int(rng.integers(margin, h - BLOCK_SIDE - margin))
            direction = 1
            pos = [px] * total
            for k in events:
                if px + direction * travel < margin or \
                        px + direction * travel > w - BLOCK_SIDE - margin:
                    direction = -direction
                for step in range(1, BURST_TRANSITIONS + 1):
                    i = k + step - 1
                    if i < total:
                        px = px + direction * BLOCK_STEP
                        pos[i] = px
                for i in range(k + BURST_TRANSITIONS, total):
                    pos[i] = px
            for i in range(total):
                frames[i] = background
                _paste(frames[i], block, pos[i], py)

    seq = FrameSequence(frames=frames, sample_fps=spec.fps,
                        source_duration=spec.duration_s)
    snapped = tuple(round(k / spec.fps, 6) for k in events)
    return seq, snapped


def generate(spec: SynthSpec, out_dir: Path,
             video_id: str | None = None) -> VideoAnnotation:
    """Write frames as zero-padded PGMs plus annotation.json (canonical
    schema, one synthetic annotator)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seq, events = generate_sequence(spec)
    for i in range(len(seq)):
        write_pgm(out / f"{i:04d}.pgm", seq.frames[i])
    ann = VideoAnnotation(video_id=video_id or out.name,
                          duration_s=spec.duration_s,
                          annotators=(events,))
    write_annotations(out / "annotation.json", [ann])
    return ann
