"""Bilinear resampling with half-pixel center alignment.

The source coordinate of destination pixel k is (k + 0.5) * scale - 0.5,
which keeps constants constant and reproduces linear ramps away from the
replicated borders.
"""

from __future__ import annotations

import numpy as np


def resize_bilinear(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize a (H, W) or (H, W, C) float array. Returns float64 for float
    input; integer input is promoted to float64 (no rounding applied)."""
    if out_h < 1 or out_w < 1:
        raise ValueError("output dimensions must be positive")
    a = np.asarray(src, dtype=np.float64)
    h, w = a.shape[:2]
    if (h, w) == (out_h, out_w):
        return a.copy()
    ys = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    fy = ys - y0
    fx = xs - x0
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    if a.ndim == 3:
        fy = fy[:, None, None]
        fx = fx[None, :, None]
        r0 = a[y0c][:, x0c] * (1 - fx) + a[y0c][:, x1c] * fx
        r1 = a[y1c][:, x0c] * (1 - fx) + a[y1c][:, x1c] * fx
    else:
        fy = fy[:, None]
        fx = fx[None, :]
        r0 = a[np.ix_(y0c, x0c)] * (1 - fx) + a[np.ix_(y0c, x1c)] * fx
        r1 = a[np.ix_(y1c, x0c)] * (1 - fx) + a[np.ix_(y1c, x1c)] * fx
    return r0 * (1 - fy) + r1 * fy


def resize_bilinear_u8(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """8-bit resize; rounds half up so gray levels are stable."""
    out = resize_bilinear(src.astype(np.float64), out_h, out_w)
    return np.floor(out + 0.5).clip(0, 255).astype(np.uint8)
