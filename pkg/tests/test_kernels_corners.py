import math

import numpy as np
import pytest

from flowgebd import ConfigError, min_eigenvalue_map, shi_tomasi_corners
from flowgebd.synth import smoothed_noise


def brute_force_scores(frame: np.ndarray) -> np.ndarray:
    """Independent per-pixel recomputation: central-difference gradients
    (replicate borders), 3x3 structure tensor, smaller eigenvalue via the
    trace/determinant form."""
    f = frame.astype(np.float64)
    h, w = f.shape

    def px(y, x):
        return f[min(max(y, 0), h - 1), min(max(x, 0), w - 1)]

    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            gx[y, x] = (px(y, x + 1) - px(y, x - 1)) / 2.0
            gy[y, x] = (px(y + 1, x) - px(y - 1, x)) / 2.0
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            sxx = sxy = syy = 0.0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    sxx += gx[yy, xx] * gx[yy, xx]
                    sxy += gx[yy, xx] * gy[yy, xx]
                    syy += gy[yy, xx] * gy[yy, xx]
            tr = sxx + syy
            det = sxx * syy - sxy * sxy
            out[y, x] = 0.5 * (tr - math.sqrt(max(tr * tr - 4.0 * det, 0.0)))
    return out


def test_scores_match_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(3):
        frame = smoothed_noise(rng, 32, 32)
        got = min_eigenvalue_map(frame)
        want = brute_force_scores(frame)
        np.testing.assert_allclose(got, want, rtol=1e-6, atol=1e-9)


def test_flat_image_returns_empty():
    frame = np.full((32, 32), 59, np.uint8)
    assert shi_tomasi_corners(frame, 10, 0.01, 3.0).shape == (0, 2)


def test_white_square_corners():
    frame = np.zeros((32, 32), np.uint8)
    frame[12:20, 12:20] = 255
    pts = shi_tomasi_corners(frame, 10, 0.1, 5.0)
    assert len(pts) == 4
    expected = [(12, 12), (19, 12), (12, 19), (19, 19)]
    for ex, ey in expected:
        d = np.hypot(pts[:, 0] - ex, pts[:, 1] - ey).min()
        assert d <= 1.5, f"no corner near ({ex},{ey})"


def test_checkerboard_crossings():
    rows, cols = np.indices((32, 32))
    frame = ((rows // 8 + cols // 8) % 2 * 255).astype(np.uint8)
    pts = shi_tomasi_corners(frame, 20, 0.2, 4.0)
    crossings = [(x, y) for x in (8, 16, 24) for y in (8, 16, 24)]
    assert len(pts) == 9
    for ex, ey in crossings:
        d = np.hypot(pts[:, 0] - ex, pts[:, 1] - ey).min()
        assert d <= 1.5, f"no crossing near ({ex},{ey})"


def test_ordering_threshold_and_spacing():
    rng = np.random.default_rng(3)
    frame = smoothed_noise(rng, 48, 48)
    scores = min_eigenvalue_map(frame)
    pts = shi_tomasi_corners(frame, 12, 0.05, 4.0)
    assert 0 < len(pts) <= 12
    vals = [scores[int(y), int(x)] for x, y in pts]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert min(vals) >= 0.05 * scores.max()
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert np.hypot(*(pts[i] - pts[j])) >= 4.0


def test_parameter_validation():
    frame = np.zeros((8, 8), np.uint8)
    with pytest.raises(ConfigError):
        shi_tomasi_corners(frame, 10, 1.5, 3.0)
    with pytest.raises(ConfigError):
        shi_tomasi_corners(frame, 0, 0.1, 3.0)
    with pytest.raises(ConfigError):
        min_eigenvalue_map(np.zeros((2, 2), np.uint8))
