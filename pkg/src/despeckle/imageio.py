"""Grayscale image files: binary PGM (P5), raw float64, and optional PNG.

8- and 16-bit integer images are promoted to float64 with an offset of one,
so an 8-bit file maps to intensities in ``[1, 256]`` and the logarithm stays
finite.  Saving applies the inverse offset, rounds and clamps to the file's
range; the number of clamped pixels is returned.

Raw float64 layout (little-endian)::

    bytes 0-7    magic b"DSPKF64\\0"
    bytes 8-11   m (uint32, rows)
    bytes 12-15  n (uint32, columns)
    bytes 16-    m*n float64 values, row-major
"""

from pathlib import Path
import struct

import numpy as np

__all__ = ["read_image", "write_image", "image_bits", "read_pgm", "write_pgm", "read_raw", "write_raw", "RAW_MAGIC"]

RAW_MAGIC = b"DSPKF64\0"
INTENSITY_OFFSET = 1.0


def _pgm_tokens(data):
    """Yield (token, end offset) for the header, skipping comments."""
    pos = 0
    n = len(data)
    while True:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PGM header")
        yield data[start:pos], pos


def read_pgm(path):
    """Read a binary P5 PGM; returns the integer array (uint8 or uint16)."""
    data = Path(path).read_bytes()
    tokens = _pgm_tokens(data)
    magic, _ = next(tokens)
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    width = int(next(tokens)[0])
    height = int(next(tokens)[0])
    maxval_tok, end = next(tokens)
    maxval = int(maxval_tok)
    if not 0 < maxval < 65536:
        raise ValueError(f"{path}: invalid maxval {maxval}")
    # exactly one whitespace byte separates the header from the raster
    body = data[end + 1:]
    dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
    count = width * height
    if len(body) < count * dtype.itemsize:
        raise ValueError(f"{path}: truncated raster")
    arr = np.frombuffer(body, dtype=dtype, count=count).reshape(height, width)
    return arr.astype(np.uint16 if dtype.itemsize == 2 else np.uint8)


def write_pgm(path, arr, maxval=None):
    arr = np.asarray(arr)
    if arr.ndim != 2:
        raise ValueError("PGM images must be 2-D")
    if maxval is None:
        maxval = 255 if arr.dtype == np.uint8 else 65535
    height, width = arr.shape
    header = b"P5\n%d %d\n%d\n" % (width, height, maxval)
    if maxval < 256:
        body = arr.astype(np.uint8).tobytes()
    else:
        body = arr.astype(">u2").tobytes()
    Path(path).write_bytes(header + body)


def read_raw(path):
    data = Path(path).read_bytes()
    if len(data) < 16 or data[:8] != RAW_MAGIC:
        raise ValueError(f"{path}: not a raw float64 image")
    m, n = struct.unpack("<II", data[8:16])
    if len(data) != 16 + 8 * m * n:
        raise ValueError(f"{path}: size does not match header {m}x{n}")
    return np.frombuffer(data, dtype="<f8", offset=16).reshape(m, n).astype(np.float64)


def write_raw(path, u):
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 2:
        raise ValueError("raw images must be 2-D")
    m, n = u.shape
    Path(path).write_bytes(RAW_MAGIC + struct.pack("<II", m, n) + u.astype("<f8").tobytes())


def _kind(path):
    suffix = Path(path).suffix.lower()
    if suffix in (".pgm", ".pnm"):
        return "pgm"
    if suffix == ".png":
        return "png"
    if suffix in (".raw", ".f64"):
        return "raw"
    raise ValueError(f"unsupported image extension {suffix!r} (use .pgm, .png or .raw)")


def _load_png(path):
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError("PNG support needs Pillow (pip install Pillow)") from exc
    with Image.open(path) as im:
        if im.mode not in ("L", "I;16", "I;16B", "I"):
            im = im.convert("L")
        arr = np.array(im)
    return arr.astype(np.uint16) if arr.dtype != np.uint8 else arr


def read_image(path):
    """Load any supported file as float64 intensities (integers offset by one)."""
    kind = _kind(path)
    if kind == "raw":
        return read_raw(path)
    arr = read_pgm(path) if kind == "pgm" else _load_png(path)
    return arr.astype(np.float64) + INTENSITY_OFFSET


def image_bits(path):
    """Bit depth to use when saving an image derived from ``path`` (8 or 16)."""
    kind = _kind(path)
    if kind == "pgm":
        return 16 if read_pgm(path).dtype == np.uint16 else 8
    if kind == "png":
        return 16 if _load_png(path).dtype == np.uint16 else 8
    return 8


def write_image(path, u, bits=8):
    """Save float64 intensities; returns the number of clamped pixels.

    Raw files are written losslessly and never clamp.
    """
    kind = _kind(path)
    u = np.asarray(u, dtype=np.float64)
    if kind == "raw":
        write_raw(path, u)
        return 0
    top = 255 if bits == 8 else 65535
    q = np.rint(u - INTENSITY_OFFSET)
    clamped = int(np.count_nonzero((q < 0) | (q > top)))
    q = np.clip(q, 0, top).astype(np.uint8 if bits == 8 else np.uint16)
    if kind == "pgm":
        write_pgm(path, q, maxval=top)
    else:
        try:
            from PIL import Image
        except ImportError as exc:  # pragma: no cover
            raise RuntimeError("PNG support needs Pillow (pip install Pillow)") from exc
        Image.fromarray(q).save(path)
    return clamped
