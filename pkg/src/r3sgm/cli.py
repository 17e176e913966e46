"""Command-line interface.

Machine-readable results go to stdout as ``key=value`` lines; diagnostics go
to stderr. Every command exits non-zero on invalid parameters or I/O errors.
"""

import argparse
import os
import sys

import numpy as np

from . import __version__
from .datasets import random_dot_stereogram
from .evaluation import (PROTOCOLS, StereoSample, SweepRow, bad_pixel_rate, sweep_window,
                         throughput, write_sweep_csv)
from .imageio import FormatError, read_disparity, read_gt, read_mask, read_pgm, write_pfm
from .params import ParameterError, StereoParams
from .pipeline import ALGORITHMS, run_pipeline


def _add_params(p):
    g = p.add_argument_group("matching parameters")
    g.add_argument("--dmax", type=int, default=64, help="largest disparity searched (default 64)")
    g.add_argument("--window", type=int, default=13, help="odd census window width, 3..15 (default 13)")
    g.add_argument("--p1", type=int, default=8, help="penalty for a disparity change of 1")
    g.add_argument("--p2", type=int, default=96, help="penalty for larger disparity changes")
    g.add_argument("--lr-abs", type=float, default=1.0, help="LR check tolerance in disparities")
    g.add_argument("--lr-rel", type=float, default=0.03, help="LR check tolerance relative to d")
    g.add_argument("--algo", choices=ALGORITHMS, default="r3sgm")
    g.add_argument("--no-median", action="store_true", help="skip the 3x3 median filter")
    g.add_argument("--no-lr-check", action="store_true", help="skip the left-right consistency check")
    g.add_argument("--interpolate", action="store_true", help="fill invalid pixels (KITTI background rule)")


def _params(args, window=None):
    return StereoParams(d_max=args.dmax, window=args.window if window is None else window,
                        p1=args.p1, p2=args.p2, lr_abs=args.lr_abs, lr_rel=args.lr_rel)


def _emit(**values):
    for k, v in values.items():
        if isinstance(v, float):
            v = f"{v:.4f}"
        print(f"{k}={v}")


def _read_pair(args):
    left = read_pgm(args.left)
    right = read_pgm(args.right)
    return left, right


def cmd_compute(args):
    params = _params(args)
    left, right = _read_pair(args)
    result = run_pipeline(left, right, params, algo=args.algo, median=not args.no_median,
                          lr_check=not args.no_lr_check, interpolate=args.interpolate)
    write_pfm(args.out, result.disparity)
    if args.dump_right:
        write_pfm(args.dump_right, result.right)
    _emit(width=left.shape[1], height=left.shape[0], density=result.density,
          seconds=result.seconds)
    return 0


def _load_gt(args):
    gt = read_gt(args.gt, scale=args.gt_scale)
    mask = read_mask(args.mask) if args.mask else None
    return gt, mask


def cmd_eval(args):
    params = _params(args)
    est = read_disparity(args.est)
    gt, mask = _load_gt(args)
    report = bad_pixel_rate(est, gt, args.protocol, mask)
    for line in report.lines():
        print(line)
    if args.csv:
        row = SweepRow(params.window, report.bad_rate_valid, report.density,
                       report.bad_rate_interpolated, float("nan"))
        fresh = not os.path.exists(args.csv) or os.path.getsize(args.csv) == 0
        with open(args.csv, "a", newline="") as f:
            write_sweep_csv([row], f, header=fresh)
    return 0


def _parse_widths(text):
    try:
        widths = [int(w) for w in text.split(",") if w.strip()]
    except ValueError:
        raise ParameterError(f"--widths must be a comma-separated list of odd integers, got {text!r}")
    if not widths:
        raise ParameterError("--widths is empty")
    return widths


def _sweep_samples(args):
    if args.synthetic:
        return [random_dot_stereogram(seed=args.seed)]
    if not (args.left and args.right and args.gt):
        raise ParameterError("sweep needs --left, --right and --gt (or --synthetic)")
    left, right = _read_pair(args)
    gt, mask = _load_gt(args)
    return [StereoSample(left, right, gt, mask, name=os.path.basename(args.left))]


def cmd_sweep(args):
    widths = _parse_widths(args.widths)
    params = _params(args, window=widths[0])
    for w in widths:
        _params(args, window=w)
    samples = _sweep_samples(args)
    rows = sweep_window(samples, widths, params, protocol=args.protocol, algo=args.algo,
                        timing=args.timing)
    if args.csv:
        with open(args.csv, "w", newline="") as f:
            write_sweep_csv(rows, f)
    else:
        write_sweep_csv(rows, sys.stdout)
    return 0


def _parse_size(text):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ParameterError(f"--size must look like WIDTHxHEIGHT, got {text!r}")
    if w < 1 or h < 1:
        raise ParameterError(f"--size must be positive, got {text!r}")
    return w, h


def cmd_bench(args):
    params = _params(args)
    if args.left and args.right:
        left, right = _read_pair(args)
    else:
        width, height = _parse_size(args.size)
        rng = np.random.default_rng(0)
        left = rng.integers(0, 256, (height, width), dtype=np.uint8)
        right = np.roll(left, -min(params.d_max, width - 1) // 2, axis=1)
    result = throughput(left, right, params, repeats=args.repeats)
    print(f"width={left.shape[1]} height={left.shape[0]} dmax={params.d_max} "
          f"px_per_s={result.px_per_s:.0f} seconds={result.seconds:.4f} "
          f"peak_entries={result.peak_cost_entries} peak_buffer={result.peak_buffer_bytes}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="r3sgm", description="Streaming census stereo matching.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="estimate a disparity map")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--out", required=True, help="output PFM for the left disparity map")
    p.add_argument("--dump-right", metavar="PATH", help="also write the right disparity map")
    _add_params(p)
    p.set_defaults(func=cmd_compute)

    def add_gt(p, required):
        p.add_argument("--gt", required=required, help="ground truth (PGM or PFM)")
        p.add_argument("--gt-scale", type=float, default=1.0,
                       help="divisor for raw ground-truth values (256 for KITTI, 16 for Tsukuba)")
        p.add_argument("--mask", help="region mask PGM (255 = evaluated)")
        p.add_argument("--protocol", choices=PROTOCOLS, default="kitti")

    p = sub.add_parser("eval", help="score a disparity map against ground truth")
    p.add_argument("--est", required=True, help="estimated disparities (PFM, negative = invalid)")
    add_gt(p, required=True)
    p.add_argument("--csv", help="append the result as a CSV row")
    _add_params(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="census window sweep")
    p.add_argument("--left")
    p.add_argument("--right")
    add_gt(p, required=False)
    p.add_argument("--synthetic", action="store_true", help="use a random-dot stereogram")
    p.add_argument("--seed", type=int, default=0, help="seed of the synthetic stereogram")
    p.add_argument("--widths", default="3,5,7,9,11,13")
    p.add_argument("--csv", help="write CSV here instead of stdout")
    p.add_argument("--timing", action="store_true",
                   help="fill px_per_s (otherwise nan, keeping the output deterministic)")
    _add_params(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="software throughput and buffer ceiling")
    p.add_argument("--left")
    p.add_argument("--right")
    p.add_argument("--size", default="1242x375", help="synthetic input size WIDTHxHEIGHT")
    p.add_argument("--repeats", type=int, default=1)
    _add_params(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, FormatError, OSError) as exc:
        print(f"r3sgm {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
