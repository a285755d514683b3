import numpy as np
import pytest

from flowgebd import FlowParams, farneback_flow, lk_track
from flowgebd.synth import smoothed_noise


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so timing-sensitive tests measure
    the algorithms, not compilation."""
    rng = np.random.default_rng(0)
    a = smoothed_noise(rng, 48, 48)
    b = smoothed_noise(rng, 48, 48)
    lk_track(a, b, np.array([[24.0, 24.0]]), FlowParams())
    farneback_flow(a, b, FlowParams())


def shifted_pair(seed: int, height: int, width: int, dx: int, dy: int,
                 margin: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Two crops of one texture so that frame2 is frame1 translated by
    exactly (dx, dy), valid over the whole crop."""
    rng = np.random.default_rng(seed)
    big = smoothed_noise(rng, height + 2 * margin, width + 2 * margin)
    f1 = big[margin:margin + height, margin:margin + width]
    f2 = big[margin - dy:margin - dy + height, margin - dx:margin - dx + width]
    return f1.copy(), f2.copy()


def interior_grid_points(width: int, height: int, margin: int, step: int) -> np.ndarray:
    xs, ys = np.meshgrid(np.arange(margin, width - margin, step),
                         np.arange(margin, height - margin, step))
    return np.column_stack([xs.ravel(), ys.ravel()]).astype(np.float64)
