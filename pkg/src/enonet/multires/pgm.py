"""Binary PGM (P5, maxval 255) reader and writer.

The reader tolerates comments and arbitrary whitespace in the header; the
writer emits a canonical header.  Unmodified pixels round-trip bit-exactly.
"""

from __future__ import annotations

import numpy as np


class PgmError(ValueError):
    pass


def _tokens(data: bytes):
    """Yield whitespace-separated header tokens, skipping # comments."""
    i = 0
    n = len(data)
    while i < n:
        c = data[i:i + 1]
        if c.isspace():
            i += 1
            continue
        if c == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not data[j:j + 1].isspace():
            j += 1
        yield data[i:j], j
        i = j


def read_pgm(path) -> np.ndarray:
    """Read a P5 grayscale image as a (height, width) uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    fields = []
    end = 0
    for token, j in _tokens(data):
        fields.append(token)
        end = j
        if len(fields) == 4:
            break
    if len(fields) < 4:
        raise PgmError("truncated PGM header")
    magic, w_tok, h_tok, maxval_tok = fields
    if magic != b"P5":
        raise PgmError(f"not a binary PGM (magic {magic!r})")
    try:
        width, height, maxval = int(w_tok), int(h_tok), int(maxval_tok)
    except ValueError as exc:
        raise PgmError(f"malformed header fields: {exc}") from exc
    if maxval <= 0 or maxval > 255:
        raise PgmError(f"unsupported maxval {maxval} (need one byte per pixel, <= 255)")
    # exactly one whitespace byte separates the header from the raster
    start = end + 1
    raster = data[start:start + width * height]
    if len(raster) < width * height:
        raise PgmError(f"raster holds {len(raster)} bytes, expected {width * height}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def write_pgm(path, image):
    """Write a (height, width) array as P5 with maxval 255.

    Float inputs are clipped to [0, 255] and rounded to the nearest integer.
    """
    image = np.asarray(image)
    if image.ndim != 2:
        raise PgmError("image must be two-dimensional grayscale")
    if image.dtype != np.uint8:
        image = np.rint(np.clip(image.astype(float), 0.0, 255.0)).astype(np.uint8)
    height, width = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(image.tobytes())
