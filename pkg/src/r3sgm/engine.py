"""Single-pass raster-order cost aggregation (R3SGM).

Each pixel's cost vector combines its unaries with the cost vectors of the
four neighbours already visited in raster order (left, above-left, above,
above-right)::

    L(p, d) = C_p(d) + 1/4 * sum over available q of
              min(L(q, d), L(q, d - 1) + P1, L(q, d + 1) + P1, min L(q) + P2) - min L(q)

Absent neighbours (image borders) contribute nothing while the divisor stays
4. Costs are held in fixed point (see :mod:`r3sgm.fixed`), and each vector's
minimum is cached alongside it so the P2 term and the normalisation reuse it.

Per image the only state kept between pixels is one row of cost vectors,
three window registers for the row above, one register for the left
neighbour and the vector under construction.
"""

from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np

from .census import StreamStats, stream_unaries
from .fixed import FRAC_BITS, add_increments, to_fixed
from .params import DISP_DTYPE, ParameterError, check_pair

N_NEIGHBOURS = 4
COST_DTYPE = np.int64
COST_BYTES = np.dtype(COST_DTYPE).itemsize


def penalty(d, d_prime, params):
    """Smoothness cost between neighbouring disparities."""
    diff = abs(d - d_prime)
    if diff == 0:
        return 0
    if diff == 1:
        return params.p1
    return params.p2


@dataclass
class CostVector:
    """Fixed-point costs of one pixel with their cached minimum."""

    costs: np.ndarray
    cached_min: int

    @classmethod
    def of(cls, costs):
        costs = np.asarray(costs, dtype=COST_DTYPE)
        return cls(costs, int(costs.min()))

    @classmethod
    def from_integers(cls, costs):
        return cls.of(to_fixed(costs))


@numba.njit(cache=True)
def _combine(unary, acc, out):
    # out = C + acc / 4, floored in fixed point; returns (argmin, min)
    n = unary.shape[0]
    best_d = 0
    m = 0
    for d in range(n):
        v = (np.int64(unary[d]) << FRAC_BITS) + (acc[d] >> 2)
        out[d] = v
        if d == 0 or v < m:
            m = v
            best_d = d
    return best_d, m


@numba.njit(cache=True)
def _lattice_step(unary, x, width, row, row_min, win, win_min, win_ok, left, left_min, left_ok,
                  p1, p2, acc, out):
    """Advance one CostLineBuffer to column x of the current row.

    On entry ``row`` holds this row's vectors for columns < x and the previous
    row's for columns >= x; ``win`` holds the previous row's vectors for
    x - 2, x - 1, x. Writes the new vector to ``out`` and returns its argmin.
    """
    # shift the window: (x-1, x, x+1) of the row above
    for k in range(2):
        win[k, :] = win[k + 1, :]
        win_min[k] = win_min[k + 1]
        win_ok[k] = win_ok[k + 1]
    if x + 1 < width and win_ok[3]:
        win[2, :] = row[x + 1, :]
        win_min[2] = row_min[x + 1]
        win_ok[2] = True
    else:
        win_ok[2] = False

    acc[:] = 0
    if left_ok[0]:
        add_increments(acc, left, left_min[0], p1, p2)
    for k in range(3):
        if win_ok[k]:
            add_increments(acc, win[k], win_min[k], p1, p2)
    best_d, m = _combine(unary, acc, out)

    row[x, :] = out
    row_min[x] = m
    left[:] = out
    left_min[0] = m
    left_ok[0] = True
    return best_d


class CostLineBuffer:
    """Streaming state for one image's cost lattice.

    ``win_ok[3]`` is a flag meaning "the row buffer holds a previous row".
    """

    def __init__(self, width, n_disp):
        self.width = width
        self.n_disp = n_disp
        self.row = np.zeros((width, n_disp), dtype=COST_DTYPE)
        self.row_min = np.zeros(width, dtype=COST_DTYPE)
        self.win = np.zeros((3, n_disp), dtype=COST_DTYPE)
        self.win_min = np.zeros(3, dtype=COST_DTYPE)
        self.win_ok = np.zeros(4, dtype=np.bool_)
        self.left = np.zeros(n_disp, dtype=COST_DTYPE)
        self.left_min = np.zeros(1, dtype=COST_DTYPE)
        self.left_ok = np.zeros(1, dtype=np.bool_)
        self._acc = np.zeros(n_disp, dtype=COST_DTYPE)
        self.row_filled = 0
        self.peak_vectors = 0
        self._x = 0

    def start_row(self, y):
        self.left_ok[0] = False
        self.win_ok[:3] = False
        self.win_ok[3] = y > 0
        # preload so the first shift leaves columns 0 and 1 of the row above
        if y > 0:
            self.win[2, :] = self.row[0]
            self.win_min[2] = self.row_min[0]
            self.win_ok[2] = True
        self._x = 0

    def step(self, unary, params, out):
        x = self._x
        d = _lattice_step(unary, x, self.width, self.row, self.row_min, self.win, self.win_min,
                          self.win_ok, self.left, self.left_min, self.left_ok,
                          params.p1 << FRAC_BITS, params.p2 << FRAC_BITS, self._acc, out)
        self._x = x + 1
        self.row_filled = max(self.row_filled, x + 1)
        held = self.row_filled + int(self.win_ok[:3].sum()) + int(self.left_ok[0]) + 1
        self.peak_vectors = max(self.peak_vectors, held)
        return d

    @property
    def peak_entries(self):
        return self.peak_vectors * self.n_disp


def aggregate_step(unary, predecessors, params):
    """Cost vector of one pixel from its integer unaries and up to four neighbours.

    ``predecessors`` holds :class:`CostVector` items in fixed point, or None
    for absent neighbours.
    """
    unary = np.asarray(unary, dtype=np.int64)
    if unary.shape != (params.n_disp,):
        raise ParameterError(f"unary has {unary.size} entries, expected {params.n_disp}")
    present = [p for p in predecessors if p is not None]
    if len(present) > N_NEIGHBOURS:
        raise ParameterError(f"at most {N_NEIGHBOURS} predecessors")
    acc = np.zeros(params.n_disp, dtype=COST_DTYPE)
    for p in present:
        prev = np.asarray(p.costs, dtype=COST_DTYPE)
        if prev.shape != unary.shape:
            raise ParameterError(f"predecessor has {prev.size} entries, expected {unary.size}")
        add_increments(acc, prev, np.int64(p.cached_min),
                       np.int64(params.p1 << FRAC_BITS), np.int64(params.p2 << FRAC_BITS))
    out = np.empty(params.n_disp, dtype=COST_DTYPE)
    _combine(unary, acc, out)
    return CostVector.of(out)


def wta(costs):
    """Smallest disparity attaining the minimum cost."""
    costs = costs.costs if isinstance(costs, CostVector) else costs
    return int(np.argmin(costs))


@dataclass
class EngineStats:
    stream: StreamStats
    peak_cost_entries: int = 0
    reads_left: Optional[np.ndarray] = None
    reads_right: Optional[np.ndarray] = None

    @property
    def peak_buffer_bytes(self):
        return self.peak_cost_entries * COST_BYTES


@dataclass
class R3SGMResult:
    left: np.ndarray
    right: np.ndarray
    stats: EngineStats
    costs_left: Optional[np.ndarray] = None
    costs_right: Optional[np.ndarray] = None


def run_r3sgm_detailed(left, right, params, keep_costs=False):
    """Run the streaming matcher and return disparities plus instrumentation.

    ``keep_costs`` additionally records every fixed-point cost vector into
    full lattices for testing; that storage is outside the streaming buffers
    and is not counted.
    """
    height, width = check_pair(left, right, params)
    n = params.n_disp
    stream_stats = StreamStats()
    buf_l = CostLineBuffer(width, n)
    buf_r = CostLineBuffer(width, n)
    disp_l = np.empty((height, width), dtype=DISP_DTYPE)
    disp_r = np.empty((height, width), dtype=DISP_DTYPE)
    reads_l = np.zeros((height, width), dtype=np.int32)
    reads_r = np.zeros((height, width), dtype=np.int32)
    costs_l = np.empty((height, width, n), dtype=COST_DTYPE) if keep_costs else None
    costs_r = np.empty((height, width, n), dtype=COST_DTYPE) if keep_costs else None
    out = np.empty(n, dtype=COST_DTYPE)
    row_y = -1

    for item in stream_unaries(left, right, params, stream_stats):
        if item.y != row_y:
            row_y = item.y
            buf_l.start_row(row_y)
            buf_r.start_row(row_y)
        if item.left_costs is not None:
            reads_l[item.y, item.x] += 1
            disp_l[item.y, item.x] = buf_l.step(item.left_costs, params, out)
            if keep_costs:
                costs_l[item.y, item.x] = out
        if item.right_costs is not None:
            reads_r[item.y, item.right_x] += 1
            disp_r[item.y, item.right_x] = buf_r.step(item.right_costs, params, out)
            if keep_costs:
                costs_r[item.y, item.right_x] = out

    stats = EngineStats(stream_stats, buf_l.peak_entries + buf_r.peak_entries, reads_l, reads_r)
    return R3SGMResult(disp_l, disp_r, stats, costs_l, costs_r)


def run_r3sgm(left, right, params):
    """Left and right disparity maps (right disparities as non-negative magnitudes)."""
    result = run_r3sgm_detailed(left, right, params)
    return result.left, result.right
