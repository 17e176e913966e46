"""Fixed-point cost arithmetic shared by the averaging recursions.

Averaged recursions (R3SGM over four neighbours, MGM over two) divide a sum
of increments by the neighbour count at every pixel, so exact values carry
ever finer binary fractions. Costs are stored as int64 multiples of
``2**-FRAC_BITS``; the only rounding is the floor after each division, and
it cannot occur before about FRAC_BITS / 2 chained divisions by 4.

Headroom: a cost never exceeds ``c_max + P2 < 2**17`` and the pre-division
sum of four increments plus ``4 * C`` stays below ``2**19``, so
``19 + FRAC_BITS`` must stay under 63.
"""

from fractions import Fraction

import numba
import numpy as np

FRAC_BITS = 40
ONE = 1 << FRAC_BITS


def to_fixed(values):
    return np.asarray(values, dtype=np.int64) << np.int64(FRAC_BITS)


def to_fraction(value):
    return Fraction(int(value), ONE)


@numba.njit(cache=True)
def vector_min(v):
    m = v[0]
    for i in range(1, v.shape[0]):
        if v[i] < m:
            m = v[i]
    return m


@numba.njit(cache=True)
def add_increments(acc, prev, prev_min, p1, p2):
    """acc[d] += min(prev[d], prev[d -+ 1] + p1, min(prev) + p2) - min(prev)."""
    n = acc.shape[0]
    jump = prev_min + p2
    for d in range(n):
        best = prev[d]
        if d > 0 and prev[d - 1] + p1 < best:
            best = prev[d - 1] + p1
        if d + 1 < n and prev[d + 1] + p1 < best:
            best = prev[d + 1] + p1
        if jump < best:
            best = jump
        acc[d] += best - prev_min
