"""Frame ingestion and preprocessing.

Sources (image directories of PGM/PNG, YUV4MPEG2 files, raw YUV with a JSON
sidecar) are decoded to 8-bit luma and resampled to the analysis format:
``target_fps`` frames per second (nearest source frame to each k/fps
instant, k = 0, 1, ...) at ``target_size`` via bilinear resize. Only
luminance is kept; color inputs are converted with BT.601 weights before
resizing. No compressed-video decoding is built in: pipe through an
external decoder to Y4M or an image directory first.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError
from .kernels.resize import resize_bilinear_u8

# A luma frame is a (height, width) uint8 array, row-major.
LumaFrame = np.ndarray

_IMAGE_EXTS = {".pgm", ".png"}


@dataclass(frozen=True)
class RawGeometry:
    width: int
    height: int
    pixel_format: str  # "yuv420p" | "gray8"

    def frame_bytes(self) -> int:
        if self.pixel_format == "gray8":
            return self.width * self.height
        if self.pixel_format == "yuv420p":
            return self.width * self.height * 3 // 2
        raise FormatError(f"unsupported raw pixel format {self.pixel_format!r}")


@dataclass(frozen=True)
class SourceSpec:
    kind: str                           # "image-dir" | "y4m-file" | "raw-yuv"
    path: Path
    native_fps: float | None = None     # required for image-dir and raw-yuv
    raw_geometry: RawGeometry | None = None

    def validate(self) -> None:
        if self.kind not in ("image-dir", "y4m-file", "raw-yuv"):
            raise ConfigError(f"unknown source kind {self.kind!r}")
        if not self.path.exists():
            raise FormatError(f"source path does not exist: {self.path}")
        if self.kind in ("image-dir", "raw-yuv"):
            if self.native_fps is None or self.native_fps <= 0:
                raise ConfigError(f"{self.kind} sources need native_fps > 0")
        if self.kind == "raw-yuv" and self.raw_geometry is None:
            raise FormatError("raw-yuv sources need raw_geometry")


@dataclass
class LoadedSource:
    """Decoded frames plus the timing metadata preprocessing needs."""

    frames: list[np.ndarray]   # (H, W) luma or (H, W, 3) RGB, uint8
    native_fps: float
    source_duration: float     # seconds = frame count / native_fps


@dataclass
class FrameSequence:
    """The canonical preprocessed sequence every detector consumes."""

    frames: np.ndarray        # (L, H, W) uint8
    sample_fps: float
    source_duration: float

    def __len__(self) -> int:
        return self.frames.shape[0]

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    @property
    def width(self) -> int:
        return self.frames.shape[2]


def rgb_to_luma(frame: np.ndarray) -> np.ndarray:
    """BT.601 luma, rounded half up; r=g=b=v maps to exactly v."""
    f = frame.astype(np.float64)
    y = 0.299 * f[..., 0] + 0.587 * f[..., 1] + 0.114 * f[..., 2]
    return np.floor(y + 0.5).clip(0, 255).astype(np.uint8)


def read_pgm(path: Path) -> np.ndarray:
    """Binary 8-bit PGM (P5)."""
    data = path.read_bytes()
    pos = 0

    def token() -> bytes:
        nonlocal pos
        while pos < len(data):
            if data[pos:pos + 1].isspace():
                pos += 1
            elif data[pos:pos + 1] == b"#":
                while pos < len(data) and data[pos] != 0x0A:
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"truncated PGM header in {path}")
        return data[start:pos]

    magic = token()
    if magic != b"P5":
        raise FormatError(f"{path} is not a binary PGM (magic {magic!r})")
    try:
        width = int(token())
        height = int(token())
        maxval = int(token())
    except ValueError as e:
        raise FormatError(f"bad PGM header in {path}: {e}") from e
    if maxval > 255 or maxval < 1:
        raise FormatError(f"{path}: only 8-bit PGM supported (maxval {maxval})")
    pos += 1  # single whitespace after maxval
    raster = data[pos:pos + width * height]
    if len(raster) != width * height:
        raise FormatError(f"{path}: raster truncated")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def write_pgm(path: Path, frame: np.ndarray) -> None:
    if frame.dtype != np.uint8 or frame.ndim != 2:
        raise ConfigError("write_pgm expects a (H, W) uint8 frame")
    h, w = frame.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(frame.tobytes())


def _read_png(path: Path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        if im.mode in ("I", "I;16", "I;16B", "F"):
            raise FormatError(f"{path}: only 8-bit PNG supported (mode {im.mode})")
        if im.mode == "L":
            return np.asarray(im, dtype=np.uint8)
        if im.mode in ("RGB", "RGBA"):
            return np.asarray(im.convert("RGBA"), dtype=np.uint8)[..., :3]
        if im.mode == "P":
            return np.asarray(im.convert("RGB"), dtype=np.uint8)
        raise FormatError(f"{path}: unsupported PNG mode {im.mode}")


def _load_image_dir(spec: SourceSpec) -> LoadedSource:
    files = sorted(p for p in spec.path.iterdir()
                   if p.suffix.lower() in _IMAGE_EXTS)
    if not files:
        raise FormatError(f"no .pgm/.png frames in {spec.path}")
    frames: list[np.ndarray] = []
    shape: tuple[int, int] | None = None
    for p in files:
        try:
            img = read_pgm(p) if p.suffix.lower() == ".pgm" else _read_png(p)
        except OSError as e:
            raise FormatError(f"cannot read frame {p}: {e}") from e
        hw = img.shape[:2]
        if shape is None:
            shape = hw
        elif hw != shape:
            raise FormatError(f"frame {p} is {hw[1]}x{hw[0]}, expected "
                              f"{shape[1]}x{shape[0]}")
        frames.append(img)
    assert spec.native_fps is not None
    return LoadedSource(frames, spec.native_fps, len(frames) / spec.native_fps)


_Y4M_SIG = b"YUV4MPEG2"


def _y4m_chroma_bytes(tag: str, width: int, height: int) -> int:
    if tag.startswith("420"):
        return (width // 2) * (height // 2) * 2
    if tag.startswith("422"):
        return (width // 2) * height * 2
    if tag.startswith("444"):
        return width * height * 2
    if tag.startswith("mono"):
        return 0
    raise FormatError(f"unsupported Y4M chroma sampling C{tag}")


def _load_y4m(spec: SourceSpec) -> LoadedSource:
    data = spec.path.read_bytes()
    nl = data.find(b"\n")
    if nl < 0 or not data.startswith(_Y4M_SIG):
        raise FormatError(f"{spec.path} is not a YUV4MPEG2 file")
    width = height = 0
    fps = 0.0
    chroma = "420jpeg"
    for tok in data[len(_Y4M_SIG):nl].split():
        t = tok.decode("ascii", "replace")
        if t.startswith("W"):
            width = int(t[1:])
        elif t.startswith("H"):
            height = int(t[1:])
        elif t.startswith("F"):
            m = re.fullmatch(r"F(\d+):(\d+)", t)
            if not m or int(m.group(2)) == 0:
                raise FormatError(f"bad Y4M frame rate token {t!r}")
            fps = int(m.group(1)) / int(m.group(2))
        elif t.startswith("C"):
            chroma = t[1:]
    if width <= 0 or height <= 0 or fps <= 0:
        raise FormatError(f"{spec.path}: Y4M header missing W/H/F")
    ybytes = width * height
    skip = _y4m_chroma_bytes(chroma, width, height)
    frames: list[np.ndarray] = []
    pos = nl + 1
    while pos < len(data):
        fnl = data.find(b"\n", pos)
        if fnl < 0 or not data[pos:pos + 5] == b"FRAME":
            raise FormatError(f"{spec.path}: bad FRAME header for frame {len(frames)}")
        pos = fnl + 1
        plane = data[pos:pos + ybytes]
        if len(plane) != ybytes:
            raise FormatError(f"{spec.path}: frame {len(frames)} truncated")
        frames.append(np.frombuffer(plane, dtype=np.uint8).reshape(height, width))
        pos += ybytes + skip
    if not frames:
        raise FormatError(f"{spec.path}: no frames")
    return LoadedSource(frames, fps, len(frames) / fps)


def _load_raw_yuv(spec: SourceSpec) -> LoadedSource:
    geo = spec.raw_geometry
    assert geo is not None and spec.native_fps is not None
    step = geo.frame_bytes()
    data = spec.path.read_bytes()
    if len(data) == 0 or len(data) % step != 0:
        raise FormatError(f"{spec.path}: size {len(data)} is not a multiple of "
                          f"the {step}-byte frame")
    ybytes = geo.width * geo.height
    frames = [np.frombuffer(data[off:off + ybytes], dtype=np.uint8)
              .reshape(geo.height, geo.width)
              for off in range(0, len(data), step)]
    return LoadedSource(frames, spec.native_fps, len(frames) / spec.native_fps)


def load_frames(spec: SourceSpec) -> LoadedSource:
    """Decode a source to raw frames plus (native_fps, source_duration)."""
    spec.validate()
    if spec.kind == "image-dir":
        return _load_image_dir(spec)
    if spec.kind == "y4m-file":
        return _load_y4m(spec)
    return _load_raw_yuv(spec)


def source_from_path(path: str | Path, native_fps: float | None = None) -> SourceSpec:
    """Infer a SourceSpec from a filesystem path; raw YUV reads its
    `<file>.json` sidecar {"width", "height", "fps", "format"}."""
    p = Path(path)
    if p.is_dir():
        return SourceSpec("image-dir", p, native_fps)
    suffix = p.suffix.lower()
    if suffix == ".y4m":
        return SourceSpec("y4m-file", p, native_fps)
    if suffix in (".yuv", ".raw"):
        sidecar = p.with_name(p.name + ".json")
        if not sidecar.exists():
            raise FormatError(f"raw YUV needs a sidecar at {sidecar}")
        try:
            meta = json.loads(sidecar.read_text())
            geo = RawGeometry(int(meta["width"]), int(meta["height"]),
                              str(meta["format"]))
            fps = float(meta["fps"]) if native_fps is None else native_fps
        except (KeyError, ValueError) as e:
            raise FormatError(f"bad sidecar {sidecar}: {e}") from e
        return SourceSpec("raw-yuv", p, fps, geo)
    raise FormatError(f"cannot infer source kind for {p}")


def preprocess(source: LoadedSource, target_fps: float = 4.0,
               target_size: tuple[int, int] = (160, 160)) -> FrameSequence:
    """Resample to target_fps by nearest-instant frame selection, convert to
    luma, and resize. Deterministic: the k-th output is the source frame
    nearest to k / target_fps."""
    if not source.frames:
        raise FormatError("source produced no frames")
    if target_fps <= 0:
        raise ConfigError(f"target_fps must be positive, got {target_fps}")
    tw, th = target_size
    if tw < 16 or th < 16:
        raise ConfigError(f"target size {tw}x{th} is too small")
    n = len(source.frames)
    duration = source.source_duration
    count = max(1, int(math.ceil(duration * target_fps - 1e-9)))
    ratio = source.native_fps / target_fps
    out = np.empty((count, th, tw), dtype=np.uint8)
    last_idx = -1
    last_frame: np.ndarray | None = None
    for k in range(count):
        idx = min(int(math.floor(k * ratio + 0.5)), n - 1)
        if idx != last_idx:
            raw = source.frames[idx]
            luma = rgb_to_luma(raw) if raw.ndim == 3 else raw
            if luma.shape != (th, tw):
                luma = resize_bilinear_u8(luma, th, tw)
            last_frame = luma
            last_idx = idx
        out[k] = last_frame
    return FrameSequence(frames=out, sample_fps=target_fps,
                         source_duration=duration)


def load_sequence(spec: SourceSpec, target_fps: float = 4.0,
                  target_size: tuple[int, int] = (160, 160)) -> FrameSequence:
    """Convenience: load + preprocess in one call."""
    return preprocess(load_frames(spec), target_fps, target_size)
