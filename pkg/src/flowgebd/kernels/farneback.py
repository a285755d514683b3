"""Dense displacement estimation via quadratic polynomial expansion.

Each neighborhood of a frame is approximated as f(x) ~ x'Ax + b'x + c under
a Gaussian applicability window; for a pure translation d the linear parts
of two frames satisfy A d = (b1 - b2)/2, which is solved per pixel after
averaging the normal equations over a smoothing window, iterating a few
times per pyramid level with warped resampling of the second frame.

The expansion of one frame is reusable: `expand_pyramid` precomputes the
per-level coefficient images for a batch of equally sized frames so a video
loop only expands each frame once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import ConfigError
from .params import FarnebackParams, FlowParams
from .pyramid import _pyr_down

_BORDER_RAMP = 5  # pixels over which per-pixel equations are faded out

_gauss_cache: dict[tuple[int, float], tuple[np.ndarray, np.ndarray, np.ndarray, float, float, float, float]] = {}


def _expansion_weights(poly_n: int, sigma: float):
    """Applicability kernel and the needed entries of the inverse Gram
    matrix for the basis (1, x, y, x^2, y^2, xy)."""
    key = (poly_n, sigma)
    cached = _gauss_cache.get(key)
    if cached is not None:
        return cached
    n = poly_n // 2
    k = np.arange(-n, n + 1, dtype=np.float64)
    g = np.exp(-(k * k) / (2.0 * sigma * sigma))
    g /= g.sum()
    xg = k * g
    xxg = k * k * g
    G = np.zeros((6, 6), dtype=np.float64)
    for ky in range(-n, n + 1):
        for kx in range(-n, n + 1):
            wgt = g[ky + n] * g[kx + n]
            G[0, 0] += wgt
            G[1, 1] += wgt * kx * kx
            G[3, 3] += wgt * kx ** 4
            G[5, 5] += wgt * kx * kx * ky * ky
    G[2, 2] = G[0, 3] = G[0, 4] = G[3, 0] = G[4, 0] = G[1, 1]
    G[4, 4] = G[3, 3]
    G[3, 4] = G[4, 3] = G[5, 5]
    inv = np.linalg.inv(G)
    out = (g.astype(np.float64), xg.astype(np.float64), xxg.astype(np.float64),
           float(inv[1, 1]), float(inv[0, 3]), float(inv[3, 3]), float(inv[5, 5]))
    _gauss_cache[key] = out
    return out


@njit(cache=True, nogil=True, fastmath=True)
def _poly_expand_batch(imgs, kg, kxg, kxxg, ig11, ig03, ig33, ig55):
    """(B, H, W) float32 -> (B, H, W, 5) coefficients [bx, by, axx, ayy, axy]
    with axy already the off-diagonal entry of A. Replicate borders."""
    b, h, w = imgs.shape
    taps = kg.shape[0]
    n = (taps - 1) // 2
    out = np.empty((b, h, w, 5), dtype=np.float32)
    tmp = np.empty((3, h, w), dtype=np.float64)
    m = np.empty((6, w), dtype=np.float64)
    for bi in range(b):
        # vertical moments m0 = sum g(v) f, m1 = sum v g(v) f, m2 = sum v^2 g(v) f
        tmp[:, :, :] = 0.0
        for y in range(h):
            t0 = tmp[0, y]
            t1 = tmp[1, y]
            t2 = tmp[2, y]
            for t in range(taps):
                k = t - n
                yy = y + k
                if yy < 0:
                    yy = 0
                elif yy > h - 1:
                    yy = h - 1
                w0 = kg[t]
                w1 = kxg[t]
                w2 = kxxg[t]
                row = imgs[bi, yy]
                for x in range(w):
                    v = row[x]
                    t0[x] += w0 * v
                    t1[x] += w1 * v
                    t2[x] += w2 * v
        # horizontal pass combines into the six window moments
        for y in range(h):
            m[:, :] = 0.0
            t0 = tmp[0, y]
            t1 = tmp[1, y]
            t2 = tmp[2, y]
            for t in range(taps):
                k = t - n
                w0 = kg[t]
                w1 = kxg[t]
                w2 = kxxg[t]
                lo = -k if k < 0 else 0
                hi = w - k if k > 0 else w
                for x in range(0, lo):
                    m[0, x] += w0 * t0[0]
                    m[1, x] += w1 * t0[0]
                    m[2, x] += w0 * t1[0]
                    m[3, x] += w2 * t0[0]
                    m[4, x] += w0 * t2[0]
                    m[5, x] += w1 * t1[0]
                for x in range(lo, hi):
                    xx = x + k
                    a = t0[xx]
                    c = t1[xx]
                    m[0, x] += w0 * a
                    m[1, x] += w1 * a
                    m[2, x] += w0 * c
                    m[3, x] += w2 * a
                    m[4, x] += w0 * t2[xx]
                    m[5, x] += w1 * c
                for x in range(hi, w):
                    m[0, x] += w0 * t0[w - 1]
                    m[1, x] += w1 * t0[w - 1]
                    m[2, x] += w0 * t1[w - 1]
                    m[3, x] += w2 * t0[w - 1]
                    m[4, x] += w0 * t2[w - 1]
                    m[5, x] += w1 * t1[w - 1]
            for x in range(w):
                out[bi, y, x, 0] = ig11 * m[1, x]
                out[bi, y, x, 1] = ig11 * m[2, x]
                out[bi, y, x, 2] = ig03 * m[0, x] + ig33 * m[3, x]
                out[bi, y, x, 3] = ig03 * m[0, x] + ig33 * m[4, x]
                out[bi, y, x, 4] = 0.5 * ig55 * m[5, x]
    return out


@njit(cache=True, nogil=True, fastmath=True)
def _update_matrices_batch(r0, r1, flow, ramp_x, ramp_y, mats):
    """Per-pixel normal equations into planar channels (g00, g01, g11, h0, h1)
    given the current displacement field; the second frame's coefficients are
    sampled at the displaced position."""
    b, h, w = flow.shape[0], flow.shape[1], flow.shape[2]
    for bi in range(b):
        for y in range(h):
            ry = ramp_y[y]
            for x in range(w):
                u = flow[bi, y, x, 0]
                v = flow[bi, y, x, 1]
                qx = x + u
                qy = y + v
                if 0.0 <= qx <= w - 1.0 and 0.0 <= qy <= h - 1.0:
                    xi = int(qx)
                    yi = int(qy)
                    if qx == xi and qy == yi:
                        s0 = r1[bi, yi, xi, 0]
                        s1 = r1[bi, yi, xi, 1]
                        s2 = r1[bi, yi, xi, 2]
                        s3 = r1[bi, yi, xi, 3]
                        s4 = r1[bi, yi, xi, 4]
                    else:
                        x0 = xi if xi <= w - 2 else w - 2
                        y0 = yi if yi <= h - 2 else h - 2
                        fx = qx - x0
                        fy = qy - y0
                        a00w = (1.0 - fx) * (1.0 - fy)
                        a01w = fx * (1.0 - fy)
                        a10w = (1.0 - fx) * fy
                        a11w = fx * fy
                        s0 = (a00w * r1[bi, y0, x0, 0] + a01w * r1[bi, y0, x0 + 1, 0]
                              + a10w * r1[bi, y0 + 1, x0, 0] + a11w * r1[bi, y0 + 1, x0 + 1, 0])
                        s1 = (a00w * r1[bi, y0, x0, 1] + a01w * r1[bi, y0, x0 + 1, 1]
                              + a10w * r1[bi, y0 + 1, x0, 1] + a11w * r1[bi, y0 + 1, x0 + 1, 1])
                        s2 = (a00w * r1[bi, y0, x0, 2] + a01w * r1[bi, y0, x0 + 1, 2]
                              + a10w * r1[bi, y0 + 1, x0, 2] + a11w * r1[bi, y0 + 1, x0 + 1, 2])
                        s3 = (a00w * r1[bi, y0, x0, 3] + a01w * r1[bi, y0, x0 + 1, 3]
                              + a10w * r1[bi, y0 + 1, x0, 3] + a11w * r1[bi, y0 + 1, x0 + 1, 3])
                        s4 = (a00w * r1[bi, y0, x0, 4] + a01w * r1[bi, y0, x0 + 1, 4]
                              + a10w * r1[bi, y0 + 1, x0, 4] + a11w * r1[bi, y0 + 1, x0 + 1, 4])
                    axx = 0.5 * (r0[bi, y, x, 2] + s2)
                    ayy = 0.5 * (r0[bi, y, x, 3] + s3)
                    axy = 0.5 * (r0[bi, y, x, 4] + s4)
                    db0 = -0.5 * (s0 - r0[bi, y, x, 0]) + axx * u + axy * v
                    db1 = -0.5 * (s1 - r0[bi, y, x, 1]) + axy * u + ayy * v
                else:
                    # displaced sample unavailable: keep the prior displacement
                    # as the locally preferred solution
                    axx = r0[bi, y, x, 2]
                    ayy = r0[bi, y, x, 3]
                    axy = r0[bi, y, x, 4]
                    db0 = axx * u + axy * v
                    db1 = axy * u + ayy * v
                s = ramp_x[x] * ry
                axx *= s
                ayy *= s
                axy *= s
                db0 *= s
                db1 *= s
                mats[bi, 0, y, x] = axx * axx + axy * axy
                mats[bi, 1, y, x] = axy * (axx + ayy)
                mats[bi, 2, y, x] = ayy * ayy + axy * axy
                mats[bi, 3, y, x] = axx * db0 + axy * db1
                mats[bi, 4, y, x] = axy * db0 + ayy * db1


@njit(cache=True, nogil=True, fastmath=True)
def _box_smooth_batch(mats, half, out):
    """Renormalized box average of the 5 planar equation channels (truncated
    window near borders, divided by the true pixel count)."""
    b, h, w = mats.shape[0], mats.shape[2], mats.shape[3]
    rowsum = np.empty((h, w), dtype=np.float32)
    colacc = np.empty(w, dtype=np.float32)
    inv_cx = np.empty(w, dtype=np.float32)
    for x in range(w):
        lo = x - half if x - half > 0 else 0
        hi = x + half if x + half < w - 1 else w - 1
        inv_cx[x] = 1.0 / (hi - lo + 1)
    for bi in range(b):
        for ch in range(5):
            src = mats[bi, ch]
            for y in range(h):
                acc = 0.0
                hi = half if half < w - 1 else w - 1
                for x in range(hi + 1):
                    acc += src[y, x]
                rowsum[y, 0] = acc
                for x in range(1, w):
                    xa = x + half
                    xr = x - half - 1
                    if xa < w:
                        acc += src[y, xa]
                    if xr >= 0:
                        acc -= src[y, xr]
                    rowsum[y, x] = acc
            dst = out[bi, ch]
            for x in range(w):
                colacc[x] = 0.0
            top = half if half < h - 1 else h - 1
            for y in range(top + 1):
                for x in range(w):
                    colacc[x] += rowsum[y, x]
            inv_cy = np.float32(1.0 / (top + 1))
            for x in range(w):
                dst[0, x] = colacc[x] * inv_cx[x] * inv_cy
            for y in range(1, h):
                ya = y + half
                yr = y - half - 1
                if ya < h:
                    if yr >= 0:
                        for x in range(w):
                            colacc[x] += rowsum[ya, x] - rowsum[yr, x]
                    else:
                        for x in range(w):
                            colacc[x] += rowsum[ya, x]
                elif yr >= 0:
                    for x in range(w):
                        colacc[x] -= rowsum[yr, x]
                lo_y = y - half if y - half > 0 else 0
                hi_y = y + half if y + half < h - 1 else h - 1
                inv_cy = np.float32(1.0 / (hi_y - lo_y + 1))
                for x in range(w):
                    dst[y, x] = colacc[x] * inv_cx[x] * inv_cy


@njit(cache=True, nogil=True, fastmath=True)
def _solve_flow_batch(mats, flow):
    b, h, w = flow.shape[0], flow.shape[1], flow.shape[2]
    for bi in range(b):
        g00p = mats[bi, 0]
        g01p = mats[bi, 1]
        g11p = mats[bi, 2]
        h0p = mats[bi, 3]
        h1p = mats[bi, 4]
        for y in range(h):
            for x in range(w):
                g00 = g00p[y, x]
                g01 = g01p[y, x]
                g11 = g11p[y, x]
                h0 = h0p[y, x]
                h1 = h1p[y, x]
                det = g00 * g11 - g01 * g01 + 1e-3
                flow[bi, y, x, 0] = (g11 * h0 - g01 * h1) / det
                flow[bi, y, x, 1] = (g00 * h1 - g01 * h0) / det


@njit(cache=True, nogil=True, fastmath=True)
def _upsample_flow_batch(src, out):
    """Bilinear-resize a (B, h, w, 2) field to the (B, H, W, 2) of `out`,
    doubling vector lengths (half-pixel center alignment)."""
    b, sh, sw = src.shape[0], src.shape[1], src.shape[2]
    oh, ow = out.shape[1], out.shape[2]
    sy = sh / oh
    sx = sw / ow
    for bi in range(b):
        for y in range(oh):
            fyy = (y + 0.5) * sy - 0.5
            y0 = int(math.floor(fyy))
            fy = fyy - y0
            y1 = y0 + 1
            if y0 < 0:
                y0 = 0
            if y0 > sh - 1:
                y0 = sh - 1
            if y1 < 0:
                y1 = 0
            if y1 > sh - 1:
                y1 = sh - 1
            for x in range(ow):
                fxx = (x + 0.5) * sx - 0.5
                x0 = int(math.floor(fxx))
                fx = fxx - x0
                x1 = x0 + 1
                if x0 < 0:
                    x0 = 0
                if x0 > sw - 1:
                    x0 = sw - 1
                if x1 < 0:
                    x1 = 0
                if x1 > sw - 1:
                    x1 = sw - 1
                a00 = (1.0 - fx) * (1.0 - fy)
                a01 = fx * (1.0 - fy)
                a10 = (1.0 - fx) * fy
                a11 = fx * fy
                for ch in range(2):
                    v = (a00 * src[bi, y0, x0, ch] + a01 * src[bi, y0, x1, ch]
                         + a10 * src[bi, y1, x0, ch] + a11 * src[bi, y1, x1, ch])
                    out[bi, y, x, ch] = 2.0 * v


def _border_ramp(dim: int) -> np.ndarray:
    idx = np.arange(dim, dtype=np.float64)
    r = np.minimum((idx + 1.0) / (_BORDER_RAMP + 1.0), (dim - idx) / (_BORDER_RAMP + 1.0))
    return np.minimum(r, 1.0).astype(np.float32)


@dataclass
class ExpansionPyramid:
    """Per-level polynomial coefficient images for a batch of frames."""

    coeffs: list[np.ndarray]       # level -> (B, Hl, Wl, 5) float32
    shapes: list[tuple[int, int]]  # level -> (Hl, Wl)

    @property
    def levels(self) -> int:
        return len(self.coeffs)


def expand_pyramid(frames: np.ndarray, params: FarnebackParams,
                   pyramid_levels: int) -> ExpansionPyramid:
    """Expand a (B, H, W) batch over a capped pyramid."""
    batch = np.ascontiguousarray(frames, dtype=np.float32)
    if batch.ndim == 2:
        batch = batch[None]
    kg, kxg, kxxg, ig11, ig03, ig33, ig55 = _expansion_weights(params.poly_n, params.poly_sigma)
    min_next = 2 * params.poly_n + 2
    levels = [batch]
    while len(levels) < pyramid_levels and min(levels[-1].shape[1:]) >= 2 * min_next:
        cur = levels[-1]
        down = np.stack([_pyr_down(cur[i]) for i in range(cur.shape[0])])
        levels.append(down)
    coeffs = [_poly_expand_batch(lv, kg, kxg, kxxg, ig11, ig03, ig33, ig55) for lv in levels]
    return ExpansionPyramid(coeffs=coeffs, shapes=[lv.shape[1:3] for lv in levels])


def flow_from_expansions(exp0: ExpansionPyramid, exp1: ExpansionPyramid,
                         params: FarnebackParams) -> np.ndarray:
    """Coarse-to-fine displacement for a batch; returns (B, H, W, 2) float32."""
    levels = min(exp0.levels, exp1.levels)
    batch = exp0.coeffs[0].shape[0]
    half = params.smooth_window // 2
    flow: np.ndarray | None = None
    for lev in range(levels - 1, -1, -1):
        h, w = exp0.shapes[lev]
        if flow is None:
            flow = np.zeros((batch, h, w, 2), dtype=np.float32)
        else:
            up = np.empty((batch, h, w, 2), dtype=np.float32)
            _upsample_flow_batch(flow, up)
            flow = up
        r0 = exp0.coeffs[lev]
        r1 = exp1.coeffs[lev]
        ramp_x = _border_ramp(w)
        ramp_y = _border_ramp(h)
        mats = np.empty((batch, 5, h, w), dtype=np.float32)
        smoothed = np.empty((batch, 5, h, w), dtype=np.float32)
        _update_matrices_batch(r0, r1, flow, ramp_x, ramp_y, mats)
        for it in range(params.iterations):
            _box_smooth_batch(mats, half, smoothed)
            _solve_flow_batch(smoothed, flow)
            if it < params.iterations - 1:
                _update_matrices_batch(r0, r1, flow, ramp_x, ramp_y, mats)
    assert flow is not None
    return flow


def farneback_flow(prev: np.ndarray, next_: np.ndarray,
                   params: FlowParams | None = None) -> np.ndarray:
    """Dense per-pixel displacement from ``prev`` to ``next_`` as an
    (H, W, 2) float32 field."""
    if params is None:
        params = FlowParams()
    params.validate()
    if prev.shape != next_.shape:
        raise ConfigError(f"frame dimensions differ: {prev.shape} vs {next_.shape}")
    fb = params.farneback
    if min(prev.shape) < fb.poly_n:
        raise ConfigError(f"frames must be at least {fb.poly_n}x{fb.poly_n}")
    pair = np.stack([np.asarray(prev, dtype=np.float32),
                     np.asarray(next_, dtype=np.float32)])
    exp = expand_pyramid(pair, fb, params.pyramid_levels)
    exp0 = ExpansionPyramid([c[0:1] for c in exp.coeffs], exp.shapes)
    exp1 = ExpansionPyramid([c[1:2] for c in exp.coeffs], exp.shapes)
    return flow_from_expansions(exp0, exp1, fb)[0]


def max_flow_magnitude(field: np.ndarray) -> float:
    """Largest Euclidean displacement in a dense field."""
    f = np.asarray(field)
    if f.size == 0:
        raise ValueError("empty flow field")
    mag2 = f[..., 0].astype(np.float64) ** 2 + f[..., 1].astype(np.float64) ** 2
    return float(np.sqrt(mag2.max()))
