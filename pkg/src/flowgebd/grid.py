"""Base + centroidal patch decomposition of a frame.

An n_w x n_h tiling of disjoint base patches is augmented with an
(n_w-1) x (n_h-1) tiling of equally sized centroidal patches whose corners
sit on the centroids of adjacent base patches, so events straddling base
patch borders still fall inside some patch. Total patch count:
n_w*n_h + (n_w-1)*(n_h-1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

MIN_PATCH_SIDE = 8  # below this the flow kernels have nothing to work with


@dataclass(frozen=True)
class PatchRect:
    x0: int
    y0: int
    width: int
    height: int
    kind: str   # "base" | "centroidal"
    index: int

    @property
    def x1(self) -> int:
        return self.x0 + self.width

    @property
    def y1(self) -> int:
        return self.y0 + self.height

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1


@dataclass(frozen=True)
class PatchGrid:
    n_w: int
    n_h: int
    patch_width: int
    patch_height: int
    patches: tuple[PatchRect, ...]

    def __len__(self) -> int:
        return len(self.patches)

    @property
    def base_patches(self) -> tuple[PatchRect, ...]:
        return tuple(p for p in self.patches if p.kind == "base")

    @property
    def centroidal_patches(self) -> tuple[PatchRect, ...]:
        return tuple(p for p in self.patches if p.kind == "centroidal")


def make_grid(width: int, height: int, n_w: int, n_h: int,
              include_centroidal: bool = True) -> PatchGrid:
    """Build the patch grid for a width x height frame.

    Base patch (i, j) sits at (i*w_g, j*h_g) with w_g = width // n_w and
    h_g = height // n_h; remainder columns/rows are left out. Centroidal
    patch (i, j) is offset by half a patch in both axes. Indices enumerate
    base patches row-major, then centroidal row-major.
    ``include_centroidal=False`` gives the base-only ablation grid.
    """
    if n_w < 1 or n_h < 1:
        raise ConfigError(f"grid counts must be >= 1, got {n_w}x{n_h}")
    w_g = width // n_w
    h_g = height // n_h
    if w_g < MIN_PATCH_SIDE or h_g < MIN_PATCH_SIDE:
        raise ConfigError(
            f"patches of {w_g}x{h_g} are too small (min {MIN_PATCH_SIDE}); "
            f"reduce the grid below {n_w}x{n_h} for a {width}x{height} frame")
    patches: list[PatchRect] = []
    idx = 0
    for j in range(n_h):
        for i in range(n_w):
            patches.append(PatchRect(i * w_g, j * h_g, w_g, h_g, "base", idx))
            idx += 1
    if include_centroidal:
        for j in range(n_h - 1):
            for i in range(n_w - 1):
                patches.append(PatchRect(i * w_g + w_g // 2, j * h_g + h_g // 2,
                                         w_g, h_g, "centroidal", idx))
                idx += 1
    return PatchGrid(n_w=n_w, n_h=n_h, patch_width=w_g, patch_height=h_g,
                     patches=tuple(patches))


def extract_patch(frame: np.ndarray, rect: PatchRect) -> np.ndarray:
    """Copy of the patch pixels as a standalone frame."""
    h, w = frame.shape[:2]
    if rect.x0 < 0 or rect.y0 < 0 or rect.x1 > w or rect.y1 > h:
        raise ConfigError(f"patch {rect} exceeds the {w}x{h} frame")
    return frame[rect.y0:rect.y1, rect.x0:rect.x1].copy()
