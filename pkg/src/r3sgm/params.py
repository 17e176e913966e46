"""Shared parameters, constants and errors."""

from dataclasses import dataclass

import numpy as np

#: Sentinel stored in integer disparity maps for pixels without a disparity.
INVALID = -1

#: dtype of disparity maps produced by the pipeline.
DISP_DTYPE = np.int32

MIN_WINDOW = 3
MAX_WINDOW = 15


class ParameterError(ValueError):
    """Raised when parameters or inputs violate an operation's preconditions."""


def check_window(window):
    if isinstance(window, bool) or int(window) != window:
        raise ParameterError(f"census window must be an integer, got {window!r}")
    window = int(window)
    if window % 2 == 0 or not MIN_WINDOW <= window <= MAX_WINDOW:
        raise ParameterError(
            f"census window must be odd and in [{MIN_WINDOW}, {MAX_WINDOW}], got {window}")
    return window


@dataclass(frozen=True)
class StereoParams:
    """Parameters shared by every matcher.

    ``d_max`` is inclusive, so cost vectors have ``d_max + 1`` entries.
    """

    d_max: int = 64
    window: int = 13
    p1: int = 8
    p2: int = 96
    lr_abs: float = 1.0
    lr_rel: float = 0.03

    def __post_init__(self):
        if int(self.d_max) != self.d_max or self.d_max < 0:
            raise ParameterError(f"d_max must be a non-negative integer, got {self.d_max!r}")
        check_window(self.window)
        if int(self.p1) != self.p1 or int(self.p2) != self.p2:
            raise ParameterError("penalties must be integers")
        if not 0 < self.p1 < self.p2:
            raise ParameterError(f"penalties must satisfy 0 < P1 < P2, got P1={self.p1}, P2={self.p2}")
        if self.p2 > 2 ** 16:
            raise ParameterError(f"P2 must be at most 2**16, got {self.p2}")
        if self.lr_abs < 0:
            raise ParameterError(f"lr_abs must be >= 0, got {self.lr_abs}")
        if not 0 <= self.lr_rel < 1:
            raise ParameterError(f"lr_rel must be in [0, 1), got {self.lr_rel}")

    @property
    def n_disp(self):
        return self.d_max + 1

    @property
    def c_max(self):
        """Largest possible census Hamming distance, also the out-of-range unary."""
        return self.window * self.window - 1


def check_pair(left, right, params):
    """Validate a rectified image pair against ``params``; return (height, width)."""
    if left.ndim != 2 or right.ndim != 2:
        raise ParameterError("images must be single-channel 2-D arrays")
    if left.shape != right.shape:
        raise ParameterError(f"image sizes differ: {left.shape} vs {right.shape}")
    height, width = left.shape
    if height < 1 or width < 1:
        raise ParameterError("images must be non-empty")
    if width <= params.d_max:
        raise ParameterError(f"image width {width} must exceed d_max={params.d_max}")
    return height, width
