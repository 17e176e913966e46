"""Whole-image baselines and oracles: SGM, MGM, naive R3SGM and the global energy.

Everything here materialises full (height, width, d_max + 1) volumes; memory
use is deliberately unbounded. Directions are (dx, dy) with y pointing down,
so ``(1, 0)`` arrives from the left neighbour and ``(0, 1)`` from above.
"""

import numba
import numpy as np

from .census import unary_volumes
from .fixed import FRAC_BITS, add_increments, to_fixed, vector_min
from .params import DISP_DTYPE, INVALID, ParameterError

DIRECTIONS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
RASTER_DIRECTIONS = DIRECTIONS[:4]


def check_directions(dirs):
    dirs = tuple(tuple(int(c) for c in r) for r in dirs)
    if not dirs:
        raise ParameterError("direction set is empty")
    bad = [r for r in dirs if r not in DIRECTIONS]
    if bad:
        raise ParameterError(f"unknown directions {bad}")
    return dirs


def is_causal(r):
    """True when p - r precedes p in forward raster order."""
    dx, dy = r
    return dy > 0 or (dy == 0 and dx > 0)


def perpendicular(r):
    """r rotated by +90 degrees; for r = (1, 0) this is (0, 1), the pixel above."""
    dx, dy = r
    return (-dy, dx)


def penalty_matrix(n, p1, p2):
    d = np.arange(n)
    diff = np.abs(d[:, None] - d[None, :])
    return np.where(diff == 0, 0, np.where(diff == 1, p1, p2)).astype(np.int64)


def wta_volume(volume):
    return np.argmin(volume, axis=-1).astype(DISP_DTYPE)


@numba.njit(cache=True)
def _path_costs(unary, dx, dy, forward, p1, p2):
    height, width, n = unary.shape
    out = np.empty((height, width, n), dtype=np.int64)
    total = height * width
    for i in range(total):
        idx = i if forward else total - 1 - i
        y = idx // width
        x = idx % width
        for d in range(n):
            out[y, x, d] = unary[y, x, d]
        qx = x - dx
        qy = y - dy
        if 0 <= qx < width and 0 <= qy < height:
            add_increments(out[y, x], out[qy, qx], vector_min(out[qy, qx]), p1, p2)
    return out


def sgm_directional(unary, params, r):
    """L_r for one direction; edge pixels (no p - r) get L_r = C_p."""
    (r,) = check_directions([r])
    return _path_costs(np.ascontiguousarray(unary, dtype=np.int64), r[0], r[1], is_causal(r),
                       params.p1, params.p2)


def sgm_aggregate(unary, params, dirs=DIRECTIONS):
    dirs = check_directions(dirs)
    total = np.zeros(unary.shape, dtype=np.int64)
    for r in dirs:
        total += sgm_directional(unary, params, r)
    return total


def sgm(left, right, params, dirs=DIRECTIONS):
    """Semi-global matching over ``dirs``; returns (left disparities, summed cost volume)."""
    dirs = check_directions(dirs)
    unary, _ = unary_volumes(left, right, params)
    volume = sgm_aggregate(unary, params, dirs)
    return wta_volume(volume), volume


def sgm_pair(left, right, params, dirs=DIRECTIONS):
    """Left and right disparity maps from SGM, for LR checking."""
    dirs = check_directions(dirs)
    unary_l, unary_r = unary_volumes(left, right, params)
    return (wta_volume(sgm_aggregate(unary_l, params, dirs)),
            wta_volume(sgm_aggregate(unary_r, params, dirs)))


# ---------------------------------------------------------------------------
# MGM


@numba.njit(cache=True)
def _mgm_path(unary, order, r, s, p1, p2):
    height, width, n = unary.shape
    out = np.empty((height, width, n), dtype=np.int64)
    acc = np.empty(n, dtype=np.int64)
    for idx in order:
        y = idx // width
        x = idx % width
        acc[:] = 0
        for k in range(2):
            dx = r[0] if k == 0 else s[0]
            dy = r[1] if k == 0 else s[1]
            qx = x - dx
            qy = y - dy
            if 0 <= qx < width and 0 <= qy < height:
                add_increments(acc, out[qy, qx], vector_min(out[qy, qx]), p1, p2)
        for d in range(n):
            out[y, x, d] = (unary[y, x, d] << FRAC_BITS) + (acc[d] >> 1)
    return out


def mgm_order(height, width, r):
    """Visiting order in which p - r and p - r_perp come before p."""
    s = perpendicular(r)
    ys, xs = np.divmod(np.arange(height * width), width)
    key = (r[0] + s[0]) * xs + (r[1] + s[1]) * ys
    return np.argsort(key, kind="stable")


def mgm_directional(unary, params, r):
    """Fixed-point L_r of the two-predecessor averaged recursion for direction ``r``."""
    (r,) = check_directions([r])
    height, width, _ = unary.shape
    order = mgm_order(height, width, r)
    return _mgm_path(np.ascontiguousarray(unary, dtype=np.int64), order,
                     np.array(r, dtype=np.int64), np.array(perpendicular(r), dtype=np.int64),
                     np.int64(params.p1) << FRAC_BITS, np.int64(params.p2) << FRAC_BITS)


def mgm_aggregate(unary, params):
    total = np.zeros(unary.shape, dtype=np.int64)
    for r in DIRECTIONS:
        total += mgm_directional(unary, params, r)
    return total


def mgm(left, right, params):
    """More Global Matching over the 8 directions.

    Returns (left disparities, summed fixed-point cost volume).
    """
    unary, _ = unary_volumes(left, right, params)
    volume = mgm_aggregate(unary, params)
    return wta_volume(volume), volume


def mgm_pair(left, right, params):
    unary_l, unary_r = unary_volumes(left, right, params)
    return wta_volume(mgm_aggregate(unary_l, params)), wta_volume(mgm_aggregate(unary_r, params))


# ---------------------------------------------------------------------------
# naive R3SGM


def r3sgm_lattice(unary, params):
    """Full fixed-point cost lattice of the single four-neighbour recursion.

    Written directly from the min-over-all-d' form with an explicit penalty
    matrix, row by row with whole-image storage, using the same fixed-point
    rounding as the streaming engine.
    """
    height, width, n = unary.shape
    pen = to_fixed(penalty_matrix(n, params.p1, params.p2))
    lattice = np.zeros((height, width, n), dtype=np.int64)
    for y in range(height):
        for x in range(width):
            acc = np.zeros(n, dtype=np.int64)
            for qx, qy in ((x - 1, y), (x - 1, y - 1), (x, y - 1), (x + 1, y - 1)):
                if 0 <= qx < width and 0 <= qy < height:
                    prev = lattice[qy, qx]
                    acc += (prev[None, :] + pen).min(axis=1) - prev.min()
            lattice[y, x] = to_fixed(unary[y, x]) + (acc >> 2)
    return lattice


def r3sgm_naive_costs(left, right, params):
    unary_l, unary_r = unary_volumes(left, right, params)
    return r3sgm_lattice(unary_l, params), r3sgm_lattice(unary_r, params)


def r3sgm_naive(left, right, params):
    lat_l, lat_r = r3sgm_naive_costs(left, right, params)
    return wta_volume(lat_l), wta_volume(lat_r)


# ---------------------------------------------------------------------------
# energy

_EDGE_OFFSETS = ((1, 0), (0, 1), (1, 1), (-1, 1))


def energy(disp, unary, params):
    """Unary plus pairwise energy of a dense labelling on the 8-connected grid."""
    disp = np.asarray(disp)
    if disp.shape != unary.shape[:2]:
        raise ParameterError(f"disparity map {disp.shape} vs unaries {unary.shape[:2]}")
    if np.any(disp == INVALID) or disp.min() < 0 or disp.max() >= unary.shape[2]:
        raise ParameterError("energy needs a fully valid disparity map")
    height, width = disp.shape
    ys, xs = np.indices(disp.shape)
    total = int(unary[ys, xs, disp].astype(np.int64).sum())
    d = disp.astype(np.int64)
    for dx, dy in _EDGE_OFFSETS:
        x0, x1 = max(0, -dx), width - max(0, dx)
        a = d[0:height - dy, x0:x1]
        b = d[dy:height, x0 + dx:x1 + dx]
        diff = np.abs(a - b)
        total += int(params.p1 * np.count_nonzero(diff == 1) + params.p2 * np.count_nonzero(diff > 1))
    return total
