import numpy as np
import pytest
from hypothesis import given, strategies as st

from flowgebd import ConfigError, extract_patch, make_grid


def test_canonical_five_by_five():
    grid = make_grid(160, 160, 5, 5)
    assert len(grid) == 41
    assert len(grid.base_patches) == 25
    assert len(grid.centroidal_patches) == 16
    assert all(p.width == 32 and p.height == 32 for p in grid.patches)


def test_four_by_four():
    grid = make_grid(160, 160, 4, 4)
    assert len(grid) == 25
    assert grid.patch_width == 40


def test_single_patch_is_whole_frame():
    grid = make_grid(160, 160, 1, 1)
    assert len(grid) == 1
    p = grid.patches[0]
    assert (p.x0, p.y0, p.width, p.height) == (0, 0, 160, 160)


@given(st.integers(1, 8), st.integers(1, 8))
def test_patch_count_formula(n_w, n_h):
    grid = make_grid(160, 160, n_w, n_h)
    assert len(grid) == n_w * n_h + (n_w - 1) * (n_h - 1)


@given(st.integers(1, 5), st.integers(1, 5),
       st.integers(120, 200), st.integers(120, 200))
def test_base_patches_tile_without_overlap(n_w, n_h, width, height):
    grid = make_grid(width, height, n_w, n_h)
    cover = np.zeros((height, width), np.int32)
    for p in grid.base_patches:
        cover[p.y0:p.y1, p.x0:p.x1] += 1
    w_used = grid.patch_width * n_w
    h_used = grid.patch_height * n_h
    assert (cover[:h_used, :w_used] == 1).all()
    assert (cover[h_used:, :] == 0).all() and (cover[:, w_used:] == 0).all()


def test_centroidal_overlap_structure():
    grid = make_grid(160, 160, 5, 5)
    for c in grid.centroidal_patches:
        overlapping = [b.index for b in grid.base_patches
                       if not (c.x1 <= b.x0 or b.x1 <= c.x0
                               or c.y1 <= b.y0 or b.y1 <= c.y0)]
        assert len(overlapping) == 4
        # centered on the shared corner of those four base patches
        cx = c.x0 + c.width // 2
        cy = c.y0 + c.height // 2
        assert cx % grid.patch_width == 0 and cy % grid.patch_height == 0


def test_base_only_grid():
    grid = make_grid(160, 160, 3, 3, include_centroidal=False)
    assert len(grid) == 9
    assert not grid.centroidal_patches


def test_too_small_patches_rejected():
    with pytest.raises(ConfigError):
        make_grid(40, 40, 8, 8)
    with pytest.raises(ConfigError):
        make_grid(160, 160, 0, 5)


def test_truncation_of_remainder():
    grid = make_grid(161, 161, 5, 5)
    assert grid.patch_width == 32
    assert max(p.x1 for p in grid.patches) == 160


def test_extract_patch():
    frame = (np.arange(160 * 160) % 256).astype(np.uint8).reshape(160, 160)
    grid = make_grid(160, 160, 5, 5)
    p = grid.patches[7]
    crop = extract_patch(frame, p)
    np.testing.assert_array_equal(crop, frame[p.y0:p.y1, p.x0:p.x1])
    original = frame[p.y0, p.x0]
    crop[0, 0] = original + 1  # a copy, not a view
    assert frame[p.y0, p.x0] == original

    full = make_grid(160, 160, 1, 1).patches[0]
    np.testing.assert_array_equal(extract_patch(frame, full), frame)

    tall = grid.patches[40]  # y1 = 144 exceeds a 100-row frame
    with pytest.raises(ConfigError):
        extract_patch(frame[:100], tall)


def test_indices_enumerate_base_then_centroidal():
    grid = make_grid(160, 160, 5, 5)
    assert [p.index for p in grid.patches] == list(range(41))
    assert all(p.kind == "base" for p in grid.patches[:25])
    assert all(p.kind == "centroidal" for p in grid.patches[25:])
    # row-major
    assert (grid.patches[1].x0, grid.patches[1].y0) == (32, 0)
    assert (grid.patches[5].x0, grid.patches[5].y0) == (0, 32)
    assert (grid.patches[25].x0, grid.patches[25].y0) == (16, 16)
