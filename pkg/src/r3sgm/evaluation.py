"""Benchmark metrics, the census window sweep and software throughput."""

import csv
import dataclasses
import statistics
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .engine import run_r3sgm_detailed
from .imageio import read_mask
from .params import ParameterError
from .pipeline import run_pipeline
from .postprocess import interpolate_background, valid_mask

PROTOCOLS = ("kitti", "middlebury")
CSV_HEADER = ("window", "bad_valid", "density", "bad_interp", "px_per_s")


@dataclass
class EvalReport:
    bad_rate_valid: float
    density: float
    bad_rate_interpolated: float
    n_compared: int     # pixels valid in both estimate and ground truth
    n_bad: int = 0
    n_gt: int = 0       # ground-truth-valid pixels inside the mask
    n_bad_interpolated: int = 0

    def lines(self):
        return [
            f"bad_valid={self.bad_rate_valid:.4f}",
            f"density={self.density:.4f}",
            f"bad_interp={self.bad_rate_interpolated:.4f}",
            f"n_compared={self.n_compared}",
        ]


@dataclass
class RegionMasks:
    nonocc: np.ndarray
    all: np.ndarray
    disc: Optional[np.ndarray] = None

    @classmethod
    def from_files(cls, nonocc, all, disc=None):
        return cls(read_mask(nonocc), read_mask(all), read_mask(disc) if disc else None)

    def select(self, name):
        mask = getattr(self, name)
        if mask is None:
            raise ParameterError(f"mask {name!r} not loaded")
        return mask


def bad_mask(est, gt, protocol):
    """Per-pixel outlier flags (meaningful only where both inputs are valid)."""
    err = np.abs(np.asarray(est, dtype=np.float64) - gt)
    if protocol == "kitti":
        return err > np.maximum(3.0, 0.05 * np.abs(gt))
    if protocol == "middlebury":
        return err > 1.0
    raise ParameterError(f"unknown protocol {protocol!r}; choose from {', '.join(PROTOCOLS)}")


def bad_pixel_rate(est, gt, protocol="kitti", mask=None):
    """Outlier rate of ``est`` against ``gt`` (NaN = no ground truth).

    KITTI counts |est - gt| > max(3, 5% of gt) as bad, Middlebury |est - gt| > 1.
    ``bad_rate_valid`` is taken over pixels valid in both maps; ``density`` is
    the fraction of ground-truth pixels the estimate covers;
    ``bad_rate_interpolated`` scores the background-filled estimate over all
    ground-truth pixels.
    """
    est = np.asarray(est)
    gt = np.asarray(gt, dtype=np.float64)
    if est.shape != gt.shape:
        raise ParameterError(f"estimate {est.shape} and ground truth {gt.shape} differ in size")
    if protocol not in PROTOCOLS:
        raise ParameterError(f"unknown protocol {protocol!r}; choose from {', '.join(PROTOCOLS)}")
    region = np.isfinite(gt)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != gt.shape:
            raise ParameterError(f"mask {mask.shape} and ground truth {gt.shape} differ in size")
        region &= mask
    est_ok = valid_mask(est)
    mutual = region & est_ok
    bad = bad_mask(np.where(est_ok, est, 0), np.where(region, gt, 0), protocol)

    n_gt = int(region.sum())
    n_cmp = int(mutual.sum())
    n_bad = int((bad & mutual).sum())

    if est_ok.any():
        filled = interpolate_background(est)
        n_bad_i = int((bad_mask(filled, np.where(region, gt, 0), protocol) & region).sum())
    else:
        n_bad_i = n_gt

    return EvalReport(
        bad_rate_valid=n_bad / n_cmp if n_cmp else 0.0,
        density=n_cmp / n_gt if n_gt else 0.0,
        bad_rate_interpolated=n_bad_i / n_gt if n_gt else 0.0,
        n_compared=n_cmp,
        n_bad=n_bad,
        n_gt=n_gt,
        n_bad_interpolated=n_bad_i,
    )


# ---------------------------------------------------------------------------
# window sweep


@dataclass
class StereoSample:
    left: np.ndarray
    right: np.ndarray
    gt: np.ndarray
    mask: Optional[np.ndarray] = None
    name: str = ""


@dataclass
class SweepRow:
    window: int
    bad_valid: float
    density: float
    bad_interp: float
    px_per_s: float

    def csv_fields(self):
        rate = "nan" if np.isnan(self.px_per_s) else f"{self.px_per_s:.0f}"
        return [str(self.window), f"{self.bad_valid:.4f}", f"{self.density:.4f}",
                f"{self.bad_interp:.4f}", rate]


def evaluate_samples(samples, params, protocol="kitti", algo="r3sgm", median=True, lr_check=True):
    """Pool outlier counts over a dataset; returns (EvalReport, pixels, seconds)."""
    if not samples:
        raise ParameterError("dataset is empty")
    n_cmp = n_bad = n_gt = n_bad_i = 0
    pixels = 0
    seconds = 0.0
    for s in samples:
        result = run_pipeline(s.left, s.right, params, algo=algo, median=median, lr_check=lr_check)
        rep = bad_pixel_rate(result.disparity, s.gt, protocol, s.mask)
        n_cmp += rep.n_compared
        n_bad += rep.n_bad
        n_gt += rep.n_gt
        n_bad_i += rep.n_bad_interpolated
        pixels += s.left.size
        seconds += result.seconds
    report = EvalReport(
        bad_rate_valid=n_bad / n_cmp if n_cmp else 0.0,
        density=n_cmp / n_gt if n_gt else 0.0,
        bad_rate_interpolated=n_bad_i / n_gt if n_gt else 0.0,
        n_compared=n_cmp, n_bad=n_bad, n_gt=n_gt, n_bad_interpolated=n_bad_i,
    )
    return report, pixels, seconds


def sweep_window(samples, widths, params, protocol="kitti", algo="r3sgm", timing=True):
    """One :class:`SweepRow` per census window width."""
    widths = list(widths)
    if not widths:
        raise ParameterError("no window widths given")
    if not samples:
        raise ParameterError("dataset is empty")
    rows = []
    for w in widths:
        p = dataclasses.replace(params, window=w)
        report, pixels, seconds = evaluate_samples(samples, p, protocol, algo)
        rate = pixels / seconds if timing and seconds > 0 else float("nan")
        rows.append(SweepRow(w, report.bad_rate_valid, report.density,
                             report.bad_rate_interpolated, rate))
    return rows


def write_sweep_csv(rows, f, header=True):
    writer = csv.writer(f, lineterminator="\n")
    if header:
        writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_fields())


# ---------------------------------------------------------------------------
# throughput


@dataclass
class Throughput:
    px_per_s: float
    seconds: float
    peak_cost_entries: int
    peak_buffer_bytes: int


def throughput(left, right, params, repeats=1):
    """Median wall-clock rate of the streaming matcher and its buffer ceiling."""
    if repeats < 1:
        raise ParameterError(f"repeats must be >= 1, got {repeats}")
    times = []
    stats = None
    for _ in range(repeats):
        start = time.perf_counter()
        stats = run_r3sgm_detailed(left, right, params).stats
        times.append(time.perf_counter() - start)
    seconds = statistics.median(times)
    return Throughput(left.size / seconds, seconds, stats.peak_cost_entries, stats.peak_buffer_bytes)
