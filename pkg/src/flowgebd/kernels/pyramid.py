"""Gaussian image pyramids and the dense gradient maps the tracker samples.

Images are float32, row-major (height, width). Border handling is replicate
everywhere so that flat inputs stay flat and no spurious border gradients
appear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@njit(cache=True, nogil=True, fastmath=True)
def _pyr_down(img):
    """Binomial [1 4 6 4 1]/16 smoothing + factor-2 decimation, replicate borders."""
    h, w = img.shape
    hw = (w + 1) // 2
    hh = (h + 1) // 2
    tmp = np.empty((h, hw), dtype=np.float32)
    for y in range(h):
        for xo in range(hw):
            x = 2 * xo
            xm2 = x - 2 if x - 2 >= 0 else 0
            xm1 = x - 1 if x - 1 >= 0 else 0
            xp1 = x + 1 if x + 1 < w else w - 1
            xp2 = x + 2 if x + 2 < w else w - 1
            tmp[y, xo] = (img[y, xm2] + 4.0 * img[y, xm1] + 6.0 * img[y, x]
                          + 4.0 * img[y, xp1] + img[y, xp2]) * np.float32(1.0 / 16.0)
    out = np.empty((hh, hw), dtype=np.float32)
    for yo in range(hh):
        y = 2 * yo
        ym2 = y - 2 if y - 2 >= 0 else 0
        ym1 = y - 1 if y - 1 >= 0 else 0
        yp1 = y + 1 if y + 1 < h else h - 1
        yp2 = y + 2 if y + 2 < h else h - 1
        for xo in range(hw):
            out[yo, xo] = (tmp[ym2, xo] + 4.0 * tmp[ym1, xo] + 6.0 * tmp[y, xo]
                           + 4.0 * tmp[yp1, xo] + tmp[yp2, xo]) * np.float32(1.0 / 16.0)
    return out


def central_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel central differences (d/2), replicate borders."""
    f = img.astype(np.float32, copy=False)
    gx = np.empty_like(f)
    gy = np.empty_like(f)
    gx[:, 1:-1] = (f[:, 2:] - f[:, :-2]) * 0.5
    gx[:, 0] = (f[:, 1] - f[:, 0]) * 0.5
    gx[:, -1] = (f[:, -1] - f[:, -2]) * 0.5
    gy[1:-1, :] = (f[2:, :] - f[:-2, :]) * 0.5
    gy[0, :] = (f[1, :] - f[0, :]) * 0.5
    gy[-1, :] = (f[-1, :] - f[-2, :]) * 0.5
    return gx, gy


def build_pyramid(frame: np.ndarray, levels: int, min_size: int) -> list[np.ndarray]:
    """Smoothed float32 pyramid, finest first. Levels are dropped once the
    next level would fall below min_size on either side."""
    img = np.ascontiguousarray(frame, dtype=np.float32)
    pyr = [img]
    while len(pyr) < levels:
        cur = pyr[-1]
        if min(cur.shape) < 2 * min_size:
            break
        pyr.append(_pyr_down(cur))
    return pyr


@dataclass
class TrackPyramid:
    """Pyramid of one frame plus per-level gradient maps, reusable across
    every point set tracked against this frame."""

    images: list[np.ndarray]
    grad_x: list[np.ndarray]
    grad_y: list[np.ndarray]

    @property
    def levels(self) -> int:
        return len(self.images)


def build_track_pyramid(frame: np.ndarray, levels: int, window: int) -> TrackPyramid:
    images = build_pyramid(frame, levels, min_size=window + 2)
    gxs, gys = [], []
    for img in images:
        gx, gy = central_gradients(img)
        gxs.append(gx)
        gys.append(gy)
    return TrackPyramid(images, gxs, gys)
