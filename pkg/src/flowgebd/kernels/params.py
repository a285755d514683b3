"""Parameter bundles for the optical-flow kernels.

The defaults are conventional values for window-based sparse tracking and
polynomial-expansion dense flow at small analysis resolutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError


@dataclass(frozen=True)
class FarnebackParams:
    poly_n: int = 5          # odd; side length of the quadratic-fit neighborhood
    poly_sigma: float = 1.1  # applicability Gaussian sigma, pixels
    smooth_window: int = 13  # odd; side of the box window averaging the normal equations
    iterations: int = 3      # displacement refinement passes per pyramid level

    def validate(self) -> None:
        if self.poly_n < 3 or self.poly_n % 2 == 0:
            raise ConfigError(f"poly_n must be odd and >= 3, got {self.poly_n}")
        if self.poly_sigma <= 0:
            raise ConfigError(f"poly_sigma must be positive, got {self.poly_sigma}")
        if self.smooth_window < 1 or self.smooth_window % 2 == 0:
            raise ConfigError(f"smooth_window must be odd and >= 1, got {self.smooth_window}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")


@dataclass(frozen=True)
class FlowParams:
    pyramid_levels: int = 3  # >= 1
    window: int = 15         # odd, >= 3; tracking window side, pixels
    max_iters: int = 10
    epsilon: float = 0.01    # convergence threshold on the update step, pixels
    err_max: float = 20.0    # max mean absolute window residual, luma levels
    farneback: FarnebackParams = field(default_factory=FarnebackParams)

    def validate(self) -> None:
        if self.pyramid_levels < 1:
            raise ConfigError(f"pyramid_levels must be >= 1, got {self.pyramid_levels}")
        if self.window < 3 or self.window % 2 == 0:
            raise ConfigError(f"window must be odd and >= 3, got {self.window}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.err_max <= 0:
            raise ConfigError(f"err_max must be positive, got {self.err_max}")
        self.farneback.validate()
