"""Seeded uniform pixel sampling and seed derivation for per-region streams."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError

_MASK64 = (1 << 64) - 1


def mix_seed(seed: int, index: int) -> int:
    """Derive a stream seed from a base seed and a stream index (splitmix64),
    stable across platforms and independent of evaluation order."""
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def sample_uniform(width: int, height: int, region, fraction: float,
                   cap: int, seed: int) -> np.ndarray:
    """Distinct integer-coordinate points drawn uniformly without replacement
    from a rectangular region, as (N, 2) float64 (x, y).

    N = min(ceil(fraction * area), cap); the same seed always yields the
    same point set.
    """
    if not 0.0 < fraction <= 1.0:
        raise ConfigError(f"fraction must be in (0, 1], got {fraction}")
    if cap < 1:
        raise ConfigError(f"cap must be >= 1, got {cap}")
    rw, rh = int(region.width), int(region.height)
    if rw <= 0 or rh <= 0:
        raise ConfigError("sampling region is degenerate")
    if (region.x0 < 0 or region.y0 < 0
            or region.x0 + rw > width or region.y0 + rh > height):
        raise ConfigError("sampling region exceeds the frame")
    area = rw * rh
    if fraction * area < 1.0:
        raise ConfigError(
            f"fraction {fraction} of a {rw}x{rh} region yields no points")
    n = min(math.ceil(fraction * area), cap)
    rng = np.random.default_rng(seed)
    flat = rng.choice(area, size=n, replace=False)
    xs = (region.x0 + flat % rw).astype(np.float64)
    ys = (region.y0 + flat // rw).astype(np.float64)
    return np.column_stack([xs, ys])
