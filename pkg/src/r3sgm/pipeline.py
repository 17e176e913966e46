"""Matcher dispatch and the post-processing chain.

Order: winner-takes-all maps for both images, 3x3 median on both, LR check,
then optional background interpolation.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import postprocess, reference
from .engine import run_r3sgm
from .postprocess import LrThresholds

ALGORITHMS = ("r3sgm", "sgm8", "sgm4", "mgm")


def raw_disparities(left, right, params, algo="r3sgm"):
    """Left and right winner-takes-all maps from the chosen matcher."""
    if algo == "r3sgm":
        return run_r3sgm(left, right, params)
    if algo == "sgm8":
        return reference.sgm_pair(left, right, params, reference.DIRECTIONS)
    if algo == "sgm4":
        return reference.sgm_pair(left, right, params, reference.RASTER_DIRECTIONS)
    if algo == "mgm":
        return reference.mgm_pair(left, right, params)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")


@dataclass
class PipelineResult:
    disparity: np.ndarray     # final left map
    left: np.ndarray          # left map after median, before the LR check
    right: np.ndarray         # right map after median
    density: float            # valid fraction before interpolation
    seconds: float


def run_pipeline(left, right, params, algo="r3sgm", median=True, lr_check=True, interpolate=False):
    start = time.perf_counter()
    disp_l, disp_r = raw_disparities(left, right, params, algo)
    if median:
        disp_l = postprocess.median3x3(disp_l)
        disp_r = postprocess.median3x3(disp_r)
    out = disp_l
    if lr_check:
        out = postprocess.lr_check(disp_l, disp_r, LrThresholds.from_params(params))
    dens = postprocess.density(out)
    if interpolate and dens > 0:
        out = postprocess.interpolate_background(out)
    return PipelineResult(out, disp_l, disp_r, dens, time.perf_counter() - start)
