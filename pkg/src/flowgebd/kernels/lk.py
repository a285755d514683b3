"""Pyramidal iterative sparse tracker (Lucas-Kanade, coarse to fine).

Conventions:
  * points are (N, 2) float arrays of (x, y) positions, x along width;
  * images are 8-bit luma or float32 in [0, 255];
  * sampling is bilinear with replicate clamping at image borders;
  * a point is reported as tracked only if, at full resolution, its window
    fits inside the frame at both endpoints, the spatial gradient matrix is
    well conditioned, the update step converged below ``epsilon`` within
    ``max_iters``, and the mean absolute window residual is at most
    ``err_max`` (residual taken at the last refinement evaluation, i.e.
    within ``epsilon`` of the final position for converged points).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import ConfigError
from .params import FlowParams
from .pyramid import TrackPyramid, build_track_pyramid

# Gradient-matrix conditioning floor, min-eigenvalue per window pixel
# (luma^2 units). Flat windows sit at exactly zero.
MIN_EIG_FLOOR = 1e-4


@dataclass
class SparseFlowResult:
    """Per-point tracking outcome between two frames."""

    start_positions: np.ndarray  # (N, 2) float64
    new_positions: np.ndarray    # (N, 2) float64
    tracked: np.ndarray          # (N,) bool
    residuals: np.ndarray        # (N,) float64; mean |window difference|

    @property
    def displacements(self) -> np.ndarray:
        return self.new_positions - self.start_positions

    def __len__(self) -> int:
        return self.start_positions.shape[0]


@njit(cache=True, nogil=True, fastmath=True)
def _track_level(img0, gx0, gy0, img1, pts, disp, alive, resid,
                 win, max_iters, eps, err_max, finest, min_eig_floor):
    h, w = img0.shape
    half = win // 2
    n = pts.shape[0]
    patch0 = np.empty((win, win), np.float32)
    gxw = np.empty((win, win), np.float32)
    gyw = np.empty((win, win), np.float32)
    eps2 = eps * eps
    area = win * win
    for i in range(n):
        if alive[i] == 0:
            continue
        px = pts[i, 0]
        py = pts[i, 1]
        if finest and (px - half < 0.0 or px + half > w - 1.0
                       or py - half < 0.0 or py + half > h - 1.0):
            alive[i] = 0
            continue

        # source window + gradient windows + gradient matrix, one pass
        x0f = px - half
        y0f = py - half
        ix = int(math.floor(x0f))
        iy = int(math.floor(y0f))
        fx = np.float32(x0f - ix)
        fy = np.float32(y0f - iy)
        a00 = (1.0 - fx) * (1.0 - fy)
        a01 = fx * (1.0 - fy)
        a10 = (1.0 - fx) * fy
        a11 = fx * fy
        g00 = 0.0
        g01 = 0.0
        g11 = 0.0
        if fx == 0.0 and fy == 0.0 and ix >= 0 and iy >= 0 and ix + win <= w and iy + win <= h:
            # integer-aligned window: plain copies
            for r in range(win):
                r0 = iy + r
                for c in range(win):
                    c0 = ix + c
                    gx = gx0[r0, c0]
                    gy = gy0[r0, c0]
                    patch0[r, c] = img0[r0, c0]
                    gxw[r, c] = gx
                    gyw[r, c] = gy
                    g00 += gx * gx
                    g01 += gx * gy
                    g11 += gy * gy
        elif ix >= 0 and iy >= 0 and ix + win < w and iy + win < h:
            for r in range(win):
                r0 = iy + r
                r1 = r0 + 1
                for c in range(win):
                    c0 = ix + c
                    v = (a00 * img0[r0, c0] + a01 * img0[r0, c0 + 1]
                         + a10 * img0[r1, c0] + a11 * img0[r1, c0 + 1])
                    gx = (a00 * gx0[r0, c0] + a01 * gx0[r0, c0 + 1]
                          + a10 * gx0[r1, c0] + a11 * gx0[r1, c0 + 1])
                    gy = (a00 * gy0[r0, c0] + a01 * gy0[r0, c0 + 1]
                          + a10 * gy0[r1, c0] + a11 * gy0[r1, c0 + 1])
                    patch0[r, c] = v
                    gxw[r, c] = gx
                    gyw[r, c] = gy
                    g00 += gx * gx
                    g01 += gx * gy
                    g11 += gy * gy
        else:
            for r in range(win):
                r0 = min(max(iy + r, 0), h - 1)
                r1 = min(max(iy + r + 1, 0), h - 1)
                for c in range(win):
                    c0 = min(max(ix + c, 0), w - 1)
                    c1 = min(max(ix + c + 1, 0), w - 1)
                    v = (a00 * img0[r0, c0] + a01 * img0[r0, c1]
                         + a10 * img0[r1, c0] + a11 * img0[r1, c1])
                    gx = (a00 * gx0[r0, c0] + a01 * gx0[r0, c1]
                          + a10 * gx0[r1, c0] + a11 * gx0[r1, c1])
                    gy = (a00 * gy0[r0, c0] + a01 * gy0[r0, c1]
                          + a10 * gy0[r1, c0] + a11 * gy0[r1, c1])
                    patch0[r, c] = v
                    gxw[r, c] = gx
                    gyw[r, c] = gy
                    g00 += gx * gx
                    g01 += gx * gy
                    g11 += gy * gy

        tr = g00 + g11
        det = g00 * g11 - g01 * g01
        disc = tr * tr - 4.0 * det
        if disc < 0.0:
            disc = 0.0
        lam_min = 0.5 * (tr - math.sqrt(disc))
        if lam_min / area < min_eig_floor:
            alive[i] = 0
            continue
        inv_det = 1.0 / det

        dx = disp[i, 0]
        dy = disp[i, 1]
        converged = False
        err_last = 0.0
        for _ in range(max_iters):
            qxf = px + dx - half
            qyf = py + dy - half
            jx = int(math.floor(qxf))
            jy = int(math.floor(qyf))
            if jx >= w or jy >= h or jx + win <= 0 or jy + win <= 0:
                break  # window fully off-frame: diverged, give up

            bfx = np.float32(qxf - jx)
            bfy = np.float32(qyf - jy)
            b00 = (1.0 - bfx) * (1.0 - bfy)
            b01 = bfx * (1.0 - bfy)
            b10 = (1.0 - bfx) * bfy
            b11 = bfx * bfy
            b0 = 0.0
            b1 = 0.0
            esum = 0.0
            if bfx == 0.0 and bfy == 0.0 and jx >= 0 and jy >= 0 and jx + win <= w and jy + win <= h:
                for r in range(win):
                    r0 = jy + r
                    for c in range(win):
                        di = patch0[r, c] - img1[r0, jx + c]
                        b0 += di * gxw[r, c]
                        b1 += di * gyw[r, c]
                        esum += abs(di)
            elif jx >= 0 and jy >= 0 and jx + win < w and jy + win < h:
                for r in range(win):
                    r0 = jy + r
                    r1 = r0 + 1
                    for c in range(win):
                        c0 = jx + c
                        v1 = (b00 * img1[r0, c0] + b01 * img1[r0, c0 + 1]
                              + b10 * img1[r1, c0] + b11 * img1[r1, c0 + 1])
                        di = patch0[r, c] - v1
                        b0 += di * gxw[r, c]
                        b1 += di * gyw[r, c]
                        esum += abs(di)
            else:
                for r in range(win):
                    r0 = min(max(jy + r, 0), h - 1)
                    r1 = min(max(jy + r + 1, 0), h - 1)
                    for c in range(win):
                        c0 = min(max(jx + c, 0), w - 1)
                        c1 = min(max(jx + c + 1, 0), w - 1)
                        v1 = (b00 * img1[r0, c0] + b01 * img1[r0, c1]
                              + b10 * img1[r1, c0] + b11 * img1[r1, c1])
                        di = patch0[r, c] - v1
                        b0 += di * gxw[r, c]
                        b1 += di * gyw[r, c]
                        esum += abs(di)
            sx = (g11 * b0 - g01 * b1) * inv_det
            sy = (g00 * b1 - g01 * b0) * inv_det
            dx += sx
            dy += sy
            err_last = esum / area
            if sx * sx + sy * sy < eps2:
                converged = True
                break
        disp[i, 0] = dx
        disp[i, 1] = dy
        if finest:
            nx = px + dx
            ny = py + dy
            resid[i] = err_last
            if (nx - half < 0.0 or nx + half > w - 1.0
                    or ny - half < 0.0 or ny + half > h - 1.0
                    or not converged or err_last > err_max):
                alive[i] = 0


def lk_track_pyramids(pyr0: TrackPyramid, pyr1: TrackPyramid,
                      points: np.ndarray, params: FlowParams) -> SparseFlowResult:
    """Track points between two prebuilt pyramids (the fast path when one
    frame participates in several tracking calls)."""
    pts = np.ascontiguousarray(np.asarray(points, dtype=np.float64).reshape(-1, 2))
    n = pts.shape[0]
    disp = np.zeros((n, 2), dtype=np.float64)
    alive = np.ones(n, dtype=np.uint8)
    resid = np.zeros(n, dtype=np.float64)
    levels = min(pyr0.levels, pyr1.levels)
    for lev in range(levels - 1, -1, -1):
        scale = 1.0 / (1 << lev)
        if lev > 0:
            # coarse levels only seed the displacement; anchoring their
            # windows on the integer grid costs no accuracy at the finest
            # level and keeps static content on the aligned fast path
            pts_l = np.floor(pts * scale + 0.5)
        else:
            pts_l = pts
        _track_level(pyr0.images[lev], pyr0.grad_x[lev], pyr0.grad_y[lev],
                     pyr1.images[lev], pts_l, disp, alive, resid,
                     params.window, params.max_iters, params.epsilon,
                     params.err_max, lev == 0, MIN_EIG_FLOOR)
        if lev > 0:
            disp *= 2.0
    return SparseFlowResult(start_positions=pts,
                            new_positions=pts + disp,
                            tracked=alive.astype(bool),
                            residuals=resid)


def lk_track(prev: np.ndarray, next_: np.ndarray, points: np.ndarray,
             params: FlowParams | None = None) -> SparseFlowResult:
    """Track sparse points from ``prev`` to ``next_``."""
    if params is None:
        params = FlowParams()
    params.validate()
    if prev.shape != next_.shape:
        raise ConfigError(f"frame dimensions differ: {prev.shape} vs {next_.shape}")
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    h, w = prev.shape
    if pts.size and ((pts[:, 0] < 0).any() or (pts[:, 0] >= w).any()
                     or (pts[:, 1] < 0).any() or (pts[:, 1] >= h).any()):
        raise ConfigError("points must lie inside the first frame")
    pyr0 = build_track_pyramid(prev, params.pyramid_levels, params.window)
    pyr1 = build_track_pyramid(next_, params.pyramid_levels, params.window)
    return lk_track_pyramids(pyr0, pyr1, pts, params)
