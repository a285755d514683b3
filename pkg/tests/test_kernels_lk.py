import numpy as np
import pytest

from flowgebd import ConfigError, FlowParams, lk_track
from flowgebd.synth import smoothed_noise

from conftest import interior_grid_points, shifted_pair


def test_identity_pair_tracks_everything():
    rng = np.random.default_rng(1)
    frame = smoothed_noise(rng, 160, 160)
    pts = interior_grid_points(160, 160, margin=16, step=12)
    res = lk_track(frame, frame, pts)
    assert res.tracked.all()
    assert np.abs(res.displacements).max() < 0.05
    assert (res.residuals[res.tracked] <= FlowParams().err_max).all()


@pytest.mark.parametrize("shift", [(2, 0), (0, -2), (3, 3), (-4, 2), (8, 0), (-8, 5)])
def test_integer_shift_recovery(shift):
    dx, dy = shift
    f1, f2 = shifted_pair(11, 160, 160, dx, dy)
    pts = interior_grid_points(160, 160, margin=20, step=10)
    res = lk_track(f1, f2, pts)
    assert res.tracked.mean() > 0.95
    err = np.abs(res.displacements[res.tracked] - [dx, dy]).max(axis=1)
    assert (err < 0.25).mean() >= 0.95


def test_flat_window_is_lost():
    frame = np.full((64, 64), 100, np.uint8)
    res = lk_track(frame, frame, np.array([[32.0, 32.0]]))
    assert not res.tracked.any()


def test_point_in_flat_region_of_textured_frame():
    rng = np.random.default_rng(2)
    frame = smoothed_noise(rng, 96, 96)
    frame[24:72, 24:72] = 128
    res = lk_track(frame, frame, np.array([[48.0, 48.0]]))
    assert not res.tracked.any()


def test_decorrelated_frames_drop_points():
    rng = np.random.default_rng(3)
    f1 = smoothed_noise(rng, 160, 160)
    f2 = smoothed_noise(rng, 160, 160)
    pts = interior_grid_points(160, 160, margin=16, step=8)
    res = lk_track(f1, f2, pts)
    assert res.tracked.mean() < 0.4


def test_dimension_mismatch_rejected():
    a = np.zeros((32, 32), np.uint8)
    b = np.zeros((32, 40), np.uint8)
    with pytest.raises(ConfigError):
        lk_track(a, b, np.array([[16.0, 16.0]]))


def test_points_outside_frame_rejected():
    a = np.zeros((32, 32), np.uint8)
    with pytest.raises(ConfigError):
        lk_track(a, a, np.array([[40.0, 16.0]]))


def test_new_positions_inside_frame_when_tracked():
    f1, f2 = shifted_pair(4, 120, 120, 4, 4)
    pts = interior_grid_points(120, 120, margin=12, step=6)
    res = lk_track(f1, f2, pts)
    new = res.new_positions[res.tracked]
    assert (new >= 0).all() and (new[:, 0] <= 119).all() and (new[:, 1] <= 119).all()
    np.testing.assert_allclose(res.displacements,
                               res.new_positions - res.start_positions)


def test_deterministic_outputs():
    f1, f2 = shifted_pair(5, 96, 96, 1, -1)
    pts = interior_grid_points(96, 96, margin=16, step=9)
    r1 = lk_track(f1, f2, pts)
    r2 = lk_track(f1, f2, pts)
    np.testing.assert_array_equal(r1.new_positions, r2.new_positions)
    np.testing.assert_array_equal(r1.tracked, r2.tracked)
    np.testing.assert_array_equal(r1.residuals, r2.residuals)
