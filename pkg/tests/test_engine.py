from fractions import Fraction

import numpy as np
import pytest

from oracles import argmin_first, exact_four_neighbour, increment
from r3sgm.census import unary_volumes
from r3sgm.engine import (CostVector, aggregate_step, penalty, run_r3sgm, run_r3sgm_detailed,
                          wta)
from r3sgm.fixed import ONE, to_fraction
from r3sgm.params import ParameterError, StereoParams
from r3sgm.reference import r3sgm_naive


def test_penalty_cases():
    p = StereoParams()
    assert penalty(5, 5, p) == 0
    assert penalty(5, 6, p) == p.p1
    assert penalty(2, 9, p) == p.p2


def test_top_left_pixel_is_unary():
    p = StereoParams(d_max=3, window=3)
    out = aggregate_step([4, 0, 7, 2], [None] * 4, p)
    assert [to_fraction(v) for v in out.costs] == [4, 0, 7, 2]


def test_flat_predecessors_add_nothing():
    p = StereoParams(d_max=3, window=3)
    flat = CostVector.from_integers([6, 6, 6, 6])
    out = aggregate_step([2, 2, 2, 2], [flat] * 4, p)
    assert [to_fraction(v) for v in out.costs] == [2, 2, 2, 2]


def test_single_step_equals_exact_fractions(rng):
    p = StereoParams(d_max=7, window=5, p1=5, p2=40)
    for _ in range(200):
        unary = rng.integers(0, 25, 8)
        k = rng.integers(0, 5)
        preds = [rng.integers(0, 300, 8) for _ in range(k)]
        got = aggregate_step(unary, [CostVector.from_integers(q) for q in preds], p)
        want = [Fraction(int(unary[d])) + Fraction(sum(increment(list(q), d, 5, 40) for q in preds), 4)
                for d in range(8)]
        assert [4 * to_fraction(v) for v in got.costs] == [4 * w for w in want]
        assert got.cached_min == min(got.costs)


def test_aggregate_step_validation():
    p = StereoParams(d_max=3, window=3)
    with pytest.raises(ParameterError):
        aggregate_step([1, 2, 3], [], p)
    with pytest.raises(ParameterError):
        aggregate_step([1, 2, 3, 4], [CostVector.from_integers([1, 2])], p)
    with pytest.raises(ParameterError):
        aggregate_step([1, 2, 3, 4], [CostVector.from_integers([0] * 4)] * 5, p)


def test_wta_examples():
    assert wta(np.array([5, 2, 7])) == 1
    assert wta(np.array([3, 3, 9])) == 0
    assert wta(np.array([4, 4, 4])) == 0


def test_single_pixel():
    img = np.array([[17]], dtype=np.uint8)
    dl, dr = run_r3sgm(img, img, StereoParams(d_max=0, window=3))
    assert dl.tolist() == [[0]] and dr.tolist() == [[0]]


def test_identical_images_give_zero(rng):
    img = rng.integers(0, 256, (12, 24)).astype(np.uint8)
    p = StereoParams(d_max=7, window=5)
    dl, dr = run_r3sgm(img, img, p)
    assert (dl[:, p.window // 2:] == 0).all()
    assert np.array_equal(dl, r3sgm_naive(img, img, p)[0])


def test_against_naive_lattice(rng):
    from conftest import random_pair
    for i in range(100):
        d_max = (1, 7, 15)[i % 3]
        p = StereoParams(d_max=d_max, window=(3, 5, 7)[i % 3])
        left, right = random_pair(rng, 24, 32, shift=i % (d_max + 1))
        got = run_r3sgm(left, right, p)
        want = r3sgm_naive(left, right, p)
        assert np.array_equal(got[0], want[0]) and np.array_equal(got[1], want[1])


def test_lattice_values_track_exact_fractions(rng):
    p = StereoParams(d_max=4, window=3, p1=3, p2=20)
    left = rng.integers(0, 256, (6, 6)).astype(np.uint8)
    right = rng.integers(0, 256, (6, 6)).astype(np.uint8)
    res = run_r3sgm_detailed(left, right, p, keep_costs=True)
    unary, _ = unary_volumes(left, right, p)
    exact = exact_four_neighbour(unary, p.p1, p.p2)
    for (x, y), vec in exact.items():
        got = [to_fraction(v) for v in res.costs_left[y, x]]
        assert max(abs(g - e) for g, e in zip(got, vec)) <= Fraction(1, 2 ** 20)
        assert res.left[y, x] == argmin_first(vec)


def test_cost_bounds(rng):
    p = StereoParams(d_max=7, window=5)
    left = rng.integers(0, 256, (10, 16)).astype(np.uint8)
    right = rng.integers(0, 256, (10, 16)).astype(np.uint8)
    res = run_r3sgm_detailed(left, right, p, keep_costs=True)
    unary_l, unary_r = unary_volumes(left, right, p)
    for lat, un in ((res.costs_left, unary_l), (res.costs_right, unary_r)):
        extra = lat - un.astype(np.int64) * ONE
        assert extra.min() >= 0 and extra.max() <= p.p2 * ONE


def test_memory_ceiling_and_height_invariance(rng):
    p = StereoParams(d_max=15, window=5)
    peaks = []
    for h in (32, 64):
        img = rng.integers(0, 256, (h, 64)).astype(np.uint8)
        stats = run_r3sgm_detailed(img, img, p).stats
        assert stats.peak_cost_entries <= 2 * (64 + 5) * p.n_disp
        peaks.append(stats.peak_cost_entries)
    assert peaks[0] == peaks[1]


def test_each_pixel_read_once(rng):
    p = StereoParams(d_max=5, window=3)
    img = rng.integers(0, 256, (7, 13)).astype(np.uint8)
    stats = run_r3sgm_detailed(img, img, p).stats
    assert (stats.reads_left == 1).all() and (stats.reads_right == 1).all()
    assert stats.stream.pixels_read == img.size


def test_rejects_narrow_image():
    img = np.zeros((4, 4), dtype=np.uint8)
    with pytest.raises(ParameterError):
        run_r3sgm(img, img, StereoParams(d_max=4, window=3))
