"""Corner scoring and selection via the structure tensor's minimum eigenvalue.

Definitions (shared with any independent re-computation of the scores):
central-difference gradients with replicate borders, 3x3 replicate-padded
summation window, score = smaller eigenvalue of [[Sxx, Sxy], [Sxy, Syy]].
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError

TENSOR_WINDOW = 3  # structure-tensor summation window, per side


def min_eigenvalue_map(frame: np.ndarray) -> np.ndarray:
    """Per-pixel corner score in float64."""
    f = np.asarray(frame, dtype=np.float64)
    if f.ndim != 2 or min(f.shape) < 3:
        raise ConfigError("corner scoring needs a 2-D frame of at least 3x3")
    gx = np.empty_like(f)
    gy = np.empty_like(f)
    gx[:, 1:-1] = (f[:, 2:] - f[:, :-2]) * 0.5
    gx[:, 0] = (f[:, 1] - f[:, 0]) * 0.5
    gx[:, -1] = (f[:, -1] - f[:, -2]) * 0.5
    gy[1:-1, :] = (f[2:, :] - f[:-2, :]) * 0.5
    gy[0, :] = (f[1, :] - f[0, :]) * 0.5
    gy[-1, :] = (f[-1, :] - f[-2, :]) * 0.5
    sxx = _box3(gx * gx)
    sxy = _box3(gx * gy)
    syy = _box3(gy * gy)
    tr = sxx + syy
    disc = np.sqrt(np.maximum((sxx - syy) ** 2 + 4.0 * sxy * sxy, 0.0))
    return 0.5 * (tr - disc)


def _box3(a: np.ndarray) -> np.ndarray:
    p = np.pad(a, 1, mode="edge")
    return (p[:-2, :-2] + p[:-2, 1:-1] + p[:-2, 2:]
            + p[1:-1, :-2] + p[1:-1, 1:-1] + p[1:-1, 2:]
            + p[2:, :-2] + p[2:, 1:-1] + p[2:, 2:])


def shi_tomasi_corners(frame: np.ndarray, max_count: int, quality_level: float,
                       min_distance: float) -> np.ndarray:
    """Strongest corners as an (N, 2) float64 array of (x, y), sorted by
    descending score, thresholded at quality_level * best score, non-max
    suppressed (3x3) and greedily spaced at least min_distance apart."""
    if not 0.0 < quality_level < 1.0:
        raise ConfigError(f"quality_level must be in (0, 1), got {quality_level}")
    if max_count < 1:
        raise ConfigError(f"max_count must be >= 1, got {max_count}")
    scores = min_eigenvalue_map(frame)
    best = scores.max()
    if best <= 0.0:
        return np.empty((0, 2), dtype=np.float64)
    p = np.pad(scores, 1, mode="constant", constant_values=-np.inf)
    neigh = np.stack([p[:-2, :-2], p[:-2, 1:-1], p[:-2, 2:],
                      p[1:-1, :-2], p[1:-1, 2:],
                      p[2:, :-2], p[2:, 1:-1], p[2:, 2:]]).max(axis=0)
    mask = (scores >= neigh) & (scores >= quality_level * best) & (scores > 0.0)
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return np.empty((0, 2), dtype=np.float64)
    order = np.lexsort((xs, ys, -scores[ys, xs]))
    ys = ys[order]
    xs = xs[order]
    picked_x: list[float] = []
    picked_y: list[float] = []
    min_d2 = float(min_distance) ** 2
    for x, y in zip(xs, ys):
        ok = True
        for px, py in zip(picked_x, picked_y):
            if (x - px) ** 2 + (y - py) ** 2 < min_d2:
                ok = False
                break
        if ok:
            picked_x.append(float(x))
            picked_y.append(float(y))
            if len(picked_x) >= max_count:
                break
    return np.column_stack([np.asarray(picked_x), np.asarray(picked_y)])
