import io

import numpy as np
import pytest

from r3sgm.datasets import load_tsukuba, random_dot_stereogram
from r3sgm.evaluation import (bad_pixel_rate, sweep_window, throughput, write_sweep_csv)
from r3sgm.params import INVALID, ParameterError, StereoParams


def test_perfect_estimate():
    gt = np.arange(1, 13, dtype=float).reshape(3, 4)
    rep = bad_pixel_rate(gt.astype(np.int32), gt)
    assert rep.bad_rate_valid == 0 and rep.density == 1 and rep.bad_rate_interpolated == 0


def test_threshold_semantics():
    gt = np.full((1, 1), 10.0)
    assert bad_pixel_rate(np.array([[14]]), gt, "kitti").n_bad == 1
    assert bad_pixel_rate(np.array([[12]]), gt, "kitti").n_bad == 0
    assert bad_pixel_rate(np.array([[12]]), gt, "middlebury").n_bad == 1
    assert bad_pixel_rate(np.array([[11]]), gt, "middlebury").n_bad == 0
    # five percent of 100 exceeds three pixels
    assert bad_pixel_rate(np.array([[104]]), np.full((1, 1), 100.0), "kitti").n_bad == 0
    assert bad_pixel_rate(np.array([[106]]), np.full((1, 1), 100.0), "kitti").n_bad == 1


def test_masks_and_invalid():
    gt = np.full((2, 2), 5.0)
    gt[0, 0] = np.nan
    est = np.array([[5, INVALID], [5, 9]], dtype=np.int32)
    rep = bad_pixel_rate(est, gt, "kitti")
    assert rep.n_gt == 3 and rep.n_compared == 2 and rep.n_bad == 1
    assert rep.density == pytest.approx(2 / 3)
    rep = bad_pixel_rate(est, gt, "kitti", mask=np.array([[1, 1], [1, 0]], dtype=bool))
    assert rep.n_gt == 2 and rep.n_bad == 0


def test_shape_and_protocol_errors():
    with pytest.raises(ParameterError):
        bad_pixel_rate(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(ParameterError):
        bad_pixel_rate(np.zeros((2, 2)), np.zeros((2, 2)), protocol="eth3d")


def test_middlebury_at_least_kitti_and_permutation(rng):
    for _ in range(50):
        gt = rng.uniform(0, 60, (8, 8))
        est = (gt + rng.normal(0, 3, gt.shape)).round().clip(0).astype(np.int32)
        k = bad_pixel_rate(est, gt, "kitti")
        m = bad_pixel_rate(est, gt, "middlebury")
        assert m.bad_rate_valid >= k.bad_rate_valid
        perm = rng.permutation(64)
        shuffled = bad_pixel_rate(est.ravel()[perm].reshape(8, 8), gt.ravel()[perm].reshape(8, 8))
        assert shuffled.bad_rate_valid == k.bad_rate_valid


def test_rds_ground_truth_is_consistent():
    s = random_dot_stereogram(height=32, width=48, seed=3)
    ys, xs = np.nonzero(np.isfinite(s.gt))
    d = s.gt[ys, xs].astype(int)
    assert np.array_equal(s.left[ys, xs], s.right[ys, xs - d])


def test_sweep_rows_and_trend():
    sample = random_dot_stereogram()
    p = StereoParams(d_max=16)
    assert len(sweep_window([sample], [3], p)) == 1
    rows = sweep_window([sample], [3, 13], p, timing=False)
    assert rows[1].bad_valid <= rows[0].bad_valid
    assert rows[1].density >= rows[0].density
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "window,bad_valid,density,bad_interp,px_per_s"
    assert lines[1].startswith("3,0.") and lines[1].endswith(",nan")
    with pytest.raises(ParameterError):
        sweep_window([], [3], p)


def test_throughput_report(rng):
    img = rng.integers(0, 256, (24, 32)).astype(np.uint8)
    p = StereoParams(d_max=7, window=5)
    t = throughput(img, img, p, repeats=1)
    assert np.isfinite(t.px_per_s) and t.px_per_s > 0
    assert t.peak_cost_entries <= 2 * (32 + 5) * p.n_disp
    tall = np.vstack([img, img])
    assert throughput(tall, tall, p).peak_buffer_bytes == t.peak_buffer_bytes
    with pytest.raises(ParameterError):
        throughput(img, img, p, repeats=0)


def test_tsukuba_missing_is_reported(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_tsukuba(tmp_path)
