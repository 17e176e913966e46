"""Streaming raster-order stereo matching with census costs.

The main entry points are :func:`run_r3sgm` (single-pass streaming matcher),
:func:`run_pipeline` (matcher plus median filter, LR check and optional
interpolation) and :func:`bad_pixel_rate` (benchmark metrics).
"""

__version__ = "0.1.0"

from .engine import aggregate_step, run_r3sgm, run_r3sgm_detailed, wta
from .evaluation import bad_pixel_rate, sweep_window, throughput
from .params import INVALID, ParameterError, StereoParams
from .pipeline import run_pipeline
from .postprocess import interpolate_background, lr_check, median3x3

__all__ = [
    "INVALID", "ParameterError", "StereoParams", "aggregate_step", "bad_pixel_rate",
    "interpolate_background", "lr_check", "median3x3", "run_pipeline", "run_r3sgm",
    "run_r3sgm_detailed", "sweep_window", "throughput", "wta",
]
