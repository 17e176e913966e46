"""Readers and writers for PGM (P5/P2), PFM ("Pf") and ground-truth disparities.

Arrays are row-major with row 0 at the top of the image. Integer disparity
maps use :data:`r3sgm.params.INVALID` for missing pixels; ground truth is
returned as float64 with NaN for missing pixels.

KITTI ground truth ships as 16-bit PNG, which is not read here. Convert it
once with e.g.::

    python -c "import cv2,sys; cv2.imwrite(sys.argv[2], cv2.imread(sys.argv[1], -1))" gt.png gt.pgm

and read the result with ``read_gt(path, scale=256)``.
"""

import numpy as np

from .params import INVALID

PFM_INVALID = -1.0


class FormatError(ValueError):
    """Malformed image file."""


class SizeMismatchError(FormatError):
    """Payload length disagrees with the header."""


def _header_tokens(buf, count, start=0):
    """Return ``count`` whitespace-separated header tokens and the payload offset.

    ``#`` comments run to the end of the line. Exactly one whitespace byte
    separates the last token from the payload.
    """
    tokens = []
    pos = start
    n = len(buf)
    while len(tokens) < count:
        while pos < n and buf[pos:pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise FormatError(f"unexpected end of header at byte {pos}")
        if buf[pos:pos + 1] == b"#":
            while pos < n and buf[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        tok_start = pos
        while pos < n and not buf[pos:pos + 1].isspace() and buf[pos:pos + 1] != b"#":
            pos += 1
        tokens.append((buf[tok_start:pos], tok_start))
    if pos >= n or not buf[pos:pos + 1].isspace():
        raise FormatError(f"expected whitespace after header at byte {pos}")
    return tokens, pos + 1


def _parse_int(token, what, lo, hi):
    raw, offset = token
    try:
        value = int(raw.decode("ascii"))
    except (UnicodeDecodeError, ValueError):
        raise FormatError(f"invalid {what} {raw!r} at byte {offset}") from None
    if not lo <= value <= hi:
        raise FormatError(f"{what} {value} out of range [{lo}, {hi}] at byte {offset}")
    return value


def decode_pgm(buf):
    """Decode PGM bytes into a uint8 or uint16 array at full precision; also return maxval."""
    magic = buf[:2]
    if magic not in (b"P5", b"P2"):
        raise FormatError(f"bad magic {magic!r} at byte 0 (expected P5 or P2)")
    tokens, data_start = _header_tokens(buf, 3, start=2)
    width = _parse_int(tokens[0], "width", 1, 2 ** 31)
    height = _parse_int(tokens[1], "height", 1, 2 ** 31)
    maxval = _parse_int(tokens[2], "maxval", 1, 65535)
    dtype = np.uint8 if maxval < 256 else np.uint16
    count = width * height

    if magic == b"P5":
        if maxval < 256:
            expected = count
            payload = np.frombuffer(buf, dtype=np.uint8, count=min(count, len(buf) - data_start),
                                    offset=data_start)
        else:
            expected = 2 * count
            avail = max(0, min(expected, len(buf) - data_start)) // 2
            payload = np.frombuffer(buf, dtype=">u2", count=avail, offset=data_start)
        if len(buf) - data_start < expected:
            raise SizeMismatchError(
                f"payload has {len(buf) - data_start} bytes, header {width}x{height} "
                f"maxval {maxval} needs {expected}")
        values = payload.astype(dtype)
    else:
        fields = buf[data_start:].split()
        if len(fields) < count:
            raise SizeMismatchError(
                f"ASCII payload has {len(fields)} samples, header {width}x{height} needs {count}")
        try:
            values = np.array([int(f) for f in fields[:count]], dtype=np.int64)
        except ValueError:
            raise FormatError(f"non-integer sample in ASCII payload after byte {data_start}") from None
        values = values.astype(dtype)

    if values.size and int(values.max()) > maxval:
        raise FormatError(f"sample exceeds maxval {maxval}")
    return values.reshape(height, width), maxval


def read_pgm(path, raw=False):
    """Read a PGM file.

    With ``raw=False`` (camera images) the result is uint8; samples of files
    with maxval > 255 are rescaled by ``v * 256 // (maxval + 1)``. With
    ``raw=True`` samples are returned untouched (uint8 or uint16).
    """
    with open(path, "rb") as f:
        buf = f.read()
    img, maxval = decode_pgm(buf)
    if raw or maxval < 256:
        return img
    return (img.astype(np.uint32) * 256 // (maxval + 1)).astype(np.uint8)


def write_pgm(path, img):
    """Write a binary PGM; uint16 input (or any value > 255) produces a 16-bit file."""
    img = np.asarray(img)
    if img.ndim != 2 or img.size == 0:
        raise ValueError("write_pgm expects a non-empty 2-D array")
    if img.min() < 0 or img.max() > 65535:
        raise ValueError("PGM samples must lie in [0, 65535]")
    wide = img.dtype == np.uint16 or img.max() > 255
    maxval = 65535 if wide else 255
    data = img.astype(">u2" if wide else np.uint8).tobytes()
    height, width = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n%d\n" % (width, height, maxval))
        f.write(data)


def write_pfm(path, disp):
    """Write a disparity map as a grayscale little-endian PFM, INVALID as -1.0."""
    disp = np.asarray(disp)
    if disp.ndim != 2 or disp.size == 0:
        raise ValueError("write_pfm expects a non-empty 2-D array")
    values = disp.astype(np.float32)
    if np.issubdtype(disp.dtype, np.integer):
        values[disp == INVALID] = PFM_INVALID
    else:
        values[~np.isfinite(disp)] = PFM_INVALID
    height, width = disp.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n%d %d\n-1.0\n" % (width, height))
        f.write(np.flipud(values).astype("<f4").tobytes())


def decode_pfm(buf):
    magic = buf[:2]
    if magic != b"Pf":
        raise FormatError(f"bad magic {magic!r} at byte 0 (expected Pf)")
    tokens, data_start = _header_tokens(buf, 3, start=2)
    width = _parse_int(tokens[0], "width", 1, 2 ** 31)
    height = _parse_int(tokens[1], "height", 1, 2 ** 31)
    raw, offset = tokens[2]
    try:
        scale = float(raw.decode("ascii"))
    except (UnicodeDecodeError, ValueError):
        raise FormatError(f"invalid scale {raw!r} at byte {offset}") from None
    if scale == 0:
        raise FormatError(f"zero scale at byte {offset}")
    expected = 4 * width * height
    if len(buf) - data_start < expected:
        raise SizeMismatchError(
            f"payload has {len(buf) - data_start} bytes, header {width}x{height} needs {expected}")
    dtype = "<f4" if scale < 0 else ">f4"
    values = np.frombuffer(buf, dtype=dtype, count=width * height, offset=data_start)
    return np.flipud(values.reshape(height, width)).astype(np.float32)


def read_pfm(path):
    """Read a grayscale PFM as float32, top row first."""
    with open(path, "rb") as f:
        return decode_pfm(f.read())


def read_disparity(path):
    """Read an integer disparity map written by :func:`write_pfm`."""
    values = read_pfm(path)
    out = np.full(values.shape, INVALID, dtype=np.int32)
    ok = np.isfinite(values) & (values >= 0)
    out[ok] = np.rint(values[ok]).astype(np.int32)
    return out


def read_gt(path, scale=1.0):
    """Read ground-truth disparities (PGM of any depth, or PFM) as float64.

    PGM raw 0 and negative or non-finite PFM values become NaN; every other
    sample is divided by ``scale``.
    """
    if not scale > 0:
        raise ValueError(f"scale must be positive, got {scale}")
    with open(path, "rb") as f:
        buf = f.read()
    if buf[:2] == b"Pf":
        values = decode_pfm(buf).astype(np.float64)
        values[~(np.isfinite(values) & (values >= 0))] = np.nan
        return values / scale
    raw, _ = decode_pgm(buf)
    values = raw.astype(np.float64) / scale
    values[raw == 0] = np.nan
    return values


def read_mask(path):
    """Region mask from a PGM image: 255 marks pixels inside the region."""
    return read_pgm(path, raw=True) == 255
