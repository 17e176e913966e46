"""Median filtering, left-right consistency and KITTI-style background fill."""

from dataclasses import dataclass

import numpy as np

from .params import DISP_DTYPE, INVALID, ParameterError


@dataclass(frozen=True)
class LrThresholds:
    abs: float = 1.0
    rel: float = 0.03

    def __post_init__(self):
        if self.abs < 0:
            raise ParameterError(f"absolute LR threshold must be >= 0, got {self.abs}")
        if not 0 <= self.rel < 1:
            raise ParameterError(f"relative LR threshold must be in [0, 1), got {self.rel}")

    @classmethod
    def from_params(cls, params):
        return cls(params.lr_abs, params.lr_rel)


def median3x3(disp):
    """Lower median of the valid values in each border-clamped 3x3 neighbourhood."""
    disp = np.asarray(disp)
    height, width = disp.shape
    padded = np.pad(disp.astype(np.int64), 1, mode="edge")
    stack = np.stack([padded[dy:dy + height, dx:dx + width] for dy in range(3) for dx in range(3)])
    valid = stack != INVALID
    # invalid samples sort to the end
    big = np.iinfo(np.int64).max
    ordered = np.sort(np.where(valid, stack, big), axis=0)
    count = valid.sum(axis=0)
    pick = np.maximum(count - 1, 0) // 2
    out = np.take_along_axis(ordered, pick[None], axis=0)[0]
    out[count == 0] = INVALID
    return out.astype(DISP_DTYPE)


def lr_check(left, right, t=LrThresholds()):
    """Keep left disparities whose match in the right map agrees within the thresholds.

    Left pixel (x, y) with disparity d is compared with right pixel
    (x - d, y); the tolerance is max(abs, rel * d).
    """
    left = np.asarray(left)
    right = np.asarray(right)
    if left.shape != right.shape:
        raise ParameterError(f"disparity maps differ in size: {left.shape} vs {right.shape}")
    height, width = left.shape
    ys, xs = np.indices(left.shape)
    target = xs - left
    ok = (left != INVALID) & (target >= 0) & (target < width)
    matched = np.full(left.shape, INVALID, dtype=np.int64)
    matched[ok] = right[ys[ok], target[ok]]
    ok &= matched != INVALID
    tol = np.maximum(t.abs, t.rel * left.astype(np.float64))
    ok &= np.abs(left.astype(np.int64) - matched) <= tol
    return np.where(ok, left, INVALID).astype(DISP_DTYPE)


def valid_mask(disp):
    """Valid pixels of an integer (INVALID sentinel) or float (NaN / negative) map."""
    disp = np.asarray(disp)
    if np.issubdtype(disp.dtype, np.integer):
        return disp != INVALID
    return np.isfinite(disp) & (disp >= 0)


def _fill_row(row, ok):
    valid = np.flatnonzero(ok)
    out = row.copy()
    out[:valid[0]] = row[valid[0]]
    out[valid[-1] + 1:] = row[valid[-1]]
    for a, b in zip(valid[:-1], valid[1:]):
        if b > a + 1:
            out[a + 1:b] = min(row[a], row[b])
    return out


def interpolate_background(disp):
    """Fill invalid pixels row-wise with the smaller flanking disparity.

    Runs touching the image border copy their only neighbour; rows with no
    valid pixel copy the nearest filled row above, else below.
    """
    disp = np.asarray(disp)
    ok = valid_mask(disp)
    if not ok.any():
        raise ParameterError("cannot interpolate a map without valid pixels")
    out = disp.copy()
    filled = ok.any(axis=1)
    for y in np.flatnonzero(filled):
        out[y] = _fill_row(disp[y], ok[y])
    rows = np.flatnonzero(filled)
    for y in np.flatnonzero(~filled):
        above = rows[rows < y]
        out[y] = out[above[-1]] if above.size else out[rows[rows > y][0]]
    return out


def density(disp):
    disp = np.asarray(disp)
    return float(np.count_nonzero(valid_mask(disp))) / disp.size
