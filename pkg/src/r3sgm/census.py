"""Census Transform features and Hamming-distance unaries.

Two routes compute the same unaries:

* :func:`stream_unaries` walks both images once in raster order, keeping
  only a few raw rows per image (line buffers) and the most recent
  ``d_max + 1`` features of the current row per image (ring buffers). This is
  what the streaming engine consumes.
* :func:`unary_volumes` materialises full cost volumes with whole-image numpy
  operations. The reference matchers use it.

Feature bit ``k`` is set when the ``k``-th non-centre pixel of the window
(raster order, coordinates clamped to the image) is strictly darker than the
centre. Bits are packed little-endian into uint64 words.
"""

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numba
import numpy as np

from .params import ParameterError, check_pair, check_window


def n_bits(window):
    return window * window - 1


def n_words(window):
    return (n_bits(window) + 63) // 64


@dataclass(frozen=True)
class CensusFeature:
    bits: int
    width: int

    def bit(self, k):
        return (self.bits >> k) & 1

    def to_list(self):
        return [self.bit(k) for k in range(self.width)]


def census_at(img, p, window):
    """Census feature of pixel ``p = (x, y)`` with border-clamped neighbours."""
    window = check_window(window)
    img = np.asarray(img)
    height, width = img.shape
    x, y = p
    if not (0 <= x < width and 0 <= y < height):
        raise ParameterError(f"pixel {p} outside {width}x{height} image")
    r = window // 2
    center = img[y, x]
    bits = 0
    k = 0
    for dy in range(-r, r + 1):
        yy = min(max(y + dy, 0), height - 1)
        for dx in range(-r, r + 1):
            if dx == 0 and dy == 0:
                continue
            xx = min(max(x + dx, 0), width - 1)
            if img[yy, xx] < center:
                bits |= 1 << k
            k += 1
    return CensusFeature(bits, n_bits(window))


def hamming(a, b):
    if a.width != b.width:
        raise ParameterError(f"feature widths differ: {a.width} vs {b.width}")
    return (a.bits ^ b.bits).bit_count()


def feature_from_words(words, window):
    bits = 0
    for i, w in enumerate(np.asarray(words, dtype=np.uint64)):
        bits |= int(w) << (64 * i)
    return CensusFeature(bits, n_bits(window))


# ---------------------------------------------------------------------------
# whole-image route


def census_image(img, window):
    """Census features of every pixel, shape (height, width, n_words) uint64."""
    window = check_window(window)
    img = np.asarray(img)
    r = window // 2
    height, width = img.shape
    padded = np.pad(img, r, mode="edge")
    words = np.zeros((height, width, n_words(window)), dtype=np.uint64)
    k = 0
    for dy in range(window):
        for dx in range(window):
            if dy == r and dx == r:
                continue
            darker = padded[dy:dy + height, dx:dx + width] < img
            words[:, :, k // 64] |= darker.astype(np.uint64) << np.uint64(k % 64)
            k += 1
    return words


def popcount(words):
    """Set-bit count summed over the last axis."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int32)


def unary_volumes(left, right, params):
    """Left and right unary volumes, each (height, width, d_max + 1) int32.

    ``left_vol[y, x, d]`` matches left pixel (x, y) with right pixel (x - d, y);
    ``right_vol[y, x, d]`` matches right pixel (x, y) with left pixel (x + d, y).
    Out-of-range disparities cost ``c_max``.
    """
    height, width = check_pair(left, right, params)
    feat_l = census_image(left, params.window)
    feat_r = census_image(right, params.window)
    n = params.n_disp
    left_vol = np.full((height, width, n), params.c_max, dtype=np.int32)
    right_vol = np.full((height, width, n), params.c_max, dtype=np.int32)
    for d in range(n):
        cost = popcount(feat_l[:, d:] ^ feat_r[:, :width - d])
        left_vol[:, d:, d] = cost
        right_vol[:, :width - d, d] = cost
    return left_vol, right_vol


# ---------------------------------------------------------------------------
# streaming route


@numba.njit(cache=True)
def _popcount64(v):
    v = v - ((v >> np.uint64(1)) & np.uint64(0x5555555555555555))
    v = (v & np.uint64(0x3333333333333333)) + ((v >> np.uint64(2)) & np.uint64(0x3333333333333333))
    v = (v + (v >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int32((v * np.uint64(0x0101010101010101)) >> np.uint64(56))


@numba.njit(cache=True)
def _census_from_block(block, x, out):
    # block: (W, width + W - 1) edge-padded rows centred on the current row;
    # the window of column x spans block[:, x:x + W].
    w = block.shape[0]
    r = w // 2
    center = block[r, x + r]
    out[:] = 0
    k = 0
    for dy in range(w):
        for dx in range(w):
            if dy == r and dx == r:
                continue
            if block[dy, x + dx] < center:
                out[k // 64] |= np.uint64(1) << np.uint64(k % 64)
            k += 1


@numba.njit(cache=True)
def _distance(a, b):
    total = 0
    for i in range(a.shape[0]):
        total += _popcount64(a[i] ^ b[i])
    return total


@numba.njit(cache=True)
def _pixel_step(block_l, block_r, x, ring_l, ring_r, d_max, c_max, left_out, right_out):
    """Push the features of column x into both rings and fill the unaries.

    Returns True when ``right_out`` holds the costs of right column x - d_max.
    """
    n = d_max + 1
    slot = x % n
    _census_from_block(block_l, x, ring_l[slot])
    _census_from_block(block_r, x, ring_r[slot])
    for d in range(n):
        if d <= x:
            left_out[d] = _distance(ring_l[slot], ring_r[(x - d) % n])
        else:
            left_out[d] = c_max
    c = x - d_max
    if c < 0:
        return False
    for d in range(n):
        right_out[d] = _distance(ring_l[(c + d) % n], ring_r[c % n])
    return True


@numba.njit(cache=True)
def _flush_step(ring_l, ring_r, c, width, d_max, c_max, right_out):
    n = d_max + 1
    for d in range(n):
        if c + d < width:
            right_out[d] = _distance(ring_l[(c + d) % n], ring_r[c % n])
        else:
            right_out[d] = c_max


class UnaryPair(NamedTuple):
    """Unaries emitted at one cursor position.

    ``left_costs`` belong to left pixel (x, y); ``right_costs`` to right
    pixel (right_x, y), which trails the cursor by ``d_max`` columns. Entries
    emitted while flushing the end of a row carry only right costs.
    """

    x: int
    y: int
    left_costs: Optional[np.ndarray]
    right_x: Optional[int]
    right_costs: Optional[np.ndarray]


@dataclass
class StreamStats:
    peak_features: int = 0   # census features held in both ring buffers
    peak_rows: int = 0       # raw rows held in one image's line buffer
    pixels_read: int = 0


class _LineBuffer:
    """Holds the raw rows needed for the census windows of the current row."""

    def __init__(self, img, radius):
        self.img = img
        self.radius = radius
        self.rows = deque()
        self.first = 0          # index of rows[0]
        self.next_row = 0

    def advance(self, y):
        height = self.img.shape[0]
        last = min(y + self.radius, height - 1)
        while self.next_row <= last:
            self.rows.append(np.asarray(self.img[self.next_row]))
            self.next_row += 1
        keep_from = max(y - self.radius, 0)
        while self.first < keep_from:
            self.rows.popleft()
            self.first += 1

    def block(self, y):
        height = self.img.shape[0]
        r = self.radius
        rows = [self.rows[min(max(y + dy, 0), height - 1) - self.first] for dy in range(-r, r + 1)]
        return np.pad(np.stack(rows), ((0, 0), (r, r)), mode="edge")


def stream_unaries(left, right, params, stats=None):
    """Yield :class:`UnaryPair` items for both images in raster order.

    Every left pixel gets one item when the cursor reaches it. A right pixel's
    costs are emitted ``d_max`` columns later, once the left features it is
    compared with are in the left ring buffer; the last ``d_max`` right
    pixels of each row are flushed after the row's final column.
    """
    height, width = check_pair(left, right, params)
    left = np.ascontiguousarray(left)
    right = np.ascontiguousarray(right)
    if stats is None:
        stats = StreamStats()
    return _stream(left, right, params, height, width, stats)


def _stream(left, right, params, height, width, stats):
    d_max = params.d_max
    n = params.n_disp
    c_max = params.c_max
    radius = params.window // 2
    words = n_words(params.window)
    lines_l = _LineBuffer(left, radius)
    lines_r = _LineBuffer(right, radius)
    ring_l = np.zeros((n, words), dtype=np.uint64)
    ring_r = np.zeros((n, words), dtype=np.uint64)

    for y in range(height):
        lines_l.advance(y)
        lines_r.advance(y)
        stats.peak_rows = max(stats.peak_rows, len(lines_l.rows), len(lines_r.rows))
        block_l = lines_l.block(y)
        block_r = lines_r.block(y)
        # rings are logically cleared at each row start; entries beyond
        # min(x + 1, n) are never read
        for x in range(width):
            stats.pixels_read += 1
            stats.peak_features = max(stats.peak_features, 2 * min(x + 1, n))
            left_costs = np.empty(n, dtype=np.int32)
            right_costs = np.empty(n, dtype=np.int32)
            if _pixel_step(block_l, block_r, x, ring_l, ring_r, d_max, c_max, left_costs, right_costs):
                yield UnaryPair(x, y, left_costs, x - d_max, right_costs)
            else:
                yield UnaryPair(x, y, left_costs, None, None)
        for c in range(width - d_max, width):
            right_costs = np.empty(n, dtype=np.int32)
            _flush_step(ring_l, ring_r, c, width, d_max, c_max, right_costs)
            yield UnaryPair(width - 1, y, None, c, right_costs)
