"""Synthetic stereo fixtures and loaders for on-disk benchmark scenes."""

import os
from pathlib import Path

import numpy as np

from .evaluation import StereoSample
from .imageio import read_gt, read_mask, read_pgm

TSUKUBA_ENV = "R3SGM_TSUKUBA"
TSUKUBA_GT_SCALE = 16
TSUKUBA_FILES = {"left": "left.pgm", "right": "right.pgm", "gt": "gt.pgm",
                 "nonocc": "nonocc.pgm", "all": "all.pgm", "disc": "disc.pgm"}


def random_dot_stereogram(height=96, width=128, background=4, foreground=12, levels=4,
                          noise=0.0, seed=0):
    """Left/right pair of a fronto-parallel square floating over a flat background.

    Dots take one of ``levels`` grey values, so small census windows see
    many near-identical neighbourhoods. ``noise`` adds independent Gaussian
    noise (grey levels) to each view. Returns a :class:`StereoSample` whose
    ground truth is NaN where the left pixel is occluded or leaves the image.
    """
    rng = np.random.default_rng(seed)
    step = 255 // max(levels - 1, 1)
    base = rng.integers(0, levels, (height, width)) * step

    disp = np.full((height, width), background, dtype=np.int64)
    y0, y1 = height // 4, 3 * height // 4
    x0, x1 = width // 3, 2 * width // 3
    disp[y0:y1, x0:x1] = foreground

    left = base.astype(np.float64)
    right = rng.integers(0, levels, (height, width)).astype(np.float64) * step
    owner = np.full((height, width), -1, dtype=np.int64)
    for y in range(height):
        for x in range(width):
            xr = x - disp[y, x]
            if xr < 0:
                continue
            # nearer surface (larger disparity) wins
            prev = owner[y, xr]
            if prev < 0 or disp[y, prev] < disp[y, x]:
                owner[y, xr] = x
                right[y, xr] = left[y, x]

    gt = np.full((height, width), np.nan)
    for y in range(height):
        for x in range(width):
            xr = x - disp[y, x]
            if xr >= 0 and owner[y, xr] == x:
                gt[y, x] = disp[y, x]

    if noise > 0:
        left = left + rng.normal(0, noise, left.shape)
        right = right + rng.normal(0, noise, right.shape)
    to_u8 = lambda a: np.clip(np.rint(a), 0, 255).astype(np.uint8)
    return StereoSample(to_u8(left), to_u8(right), gt, np.isfinite(gt), name=f"rds-{seed}")


def tsukuba_dir():
    """Directory holding the Tsukuba scene, or None when it is not installed.

    Looked up in ``$R3SGM_TSUKUBA`` and then ``data/tsukuba`` under the
    current directory. Expected files: left.pgm, right.pgm, gt.pgm
    (disparity x 16, 0 = unknown) and nonocc.pgm; all.pgm and disc.pgm are
    optional.
    """
    candidates = [os.environ.get(TSUKUBA_ENV), "data/tsukuba"]
    for c in candidates:
        if c and all((Path(c) / TSUKUBA_FILES[k]).is_file() for k in ("left", "right", "gt", "nonocc")):
            return Path(c)
    return None


def load_tsukuba(path=None, region="nonocc"):
    path = Path(path) if path else tsukuba_dir()
    if path is None:
        raise FileNotFoundError(
            f"Tsukuba scene not found; set {TSUKUBA_ENV} to a directory with "
            + ", ".join(TSUKUBA_FILES.values()))
    left = read_pgm(path / TSUKUBA_FILES["left"])
    right = read_pgm(path / TSUKUBA_FILES["right"])
    gt = read_gt(path / TSUKUBA_FILES["gt"], scale=TSUKUBA_GT_SCALE)
    mask = read_mask(path / TSUKUBA_FILES[region])
    return StereoSample(left, right, gt, mask, name="tsukuba")
