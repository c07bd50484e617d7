"""PGM (portable graymap) input and output.

Reads binary ``P5`` and ASCII ``P2`` files with ``maxval`` up to 65535
(two-byte big-endian samples above 255, per the netpbm convention) and writes
ASCII ``P2``.  This is the package's only raster interchange format.
"""

from __future__ import annotations

import numpy as np

from .errors import PgmFormatError

MAX_MAXVAL = 65535


def _read_header_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    """Parse `count` whitespace-separated integer tokens, skipping comments.

    Returns the tokens and the offset one whitespace byte past the last one.
    """
    tokens: list[int] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] != ord("\n"):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace():
            i += 1
        if start == i:
            raise PgmFormatError("truncated PGM header")
        tok = data[start:i]
        try:
            tokens.append(int(tok))
        except ValueError:
            raise PgmFormatError(f"bad PGM header token: {tok!r}") from None
    if i >= n:
        raise PgmFormatError("missing whitespace after PGM header")
    return tokens, i + 1


def read_pgm(path: str) -> tuple[np.ndarray, int]:
    """Read a P5 or P2 PGM file.

    Returns
    -------
    (samples, maxval)
        ``samples`` is an integer array of shape ``(height, width)`` with raw
        source levels in ``[0, maxval]``.
    """
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise PgmFormatError(f"cannot read {path}: {exc}") from exc
    if len(data) < 2:
        raise PgmFormatError("file too short to be a PGM")
    magic = data[:2]
    if magic not in (b"P5", b"P2"):
        raise PgmFormatError(f"unsupported magic {magic!r}; expected P5 or P2")
    (width, height, maxval), offset = _read_header_tokens(data[2:], 3)
    offset += 2
    if width <= 0 or height <= 0:
        raise PgmFormatError(f"bad dimensions {width}x{height}")
    if not 0 < maxval <= MAX_MAXVAL:
        raise PgmFormatError(f"maxval {maxval} outside (0, {MAX_MAXVAL}]")

    count = width * height
    if magic == b"P5":
        dtype = ">u2" if maxval > 255 else np.uint8
        itemsize = 2 if maxval > 255 else 1
        raster = data[offset : offset + count * itemsize]
        if len(raster) < count * itemsize:
            raise PgmFormatError("P5 raster shorter than header promises")
        samples = np.frombuffer(raster, dtype=dtype, count=count).astype(np.int64)
    else:
        text = data[offset:].split(b"#")[0] if b"#" in data[offset:] else data[offset:]
        try:
            flat = np.array(text.split(), dtype=np.int64)
        except ValueError:
            raise PgmFormatError("non-integer sample in P2 raster") from None
        if flat.size < count:
            raise PgmFormatError("P2 raster shorter than header promises")
        samples = flat[:count]
    if samples.min() < 0 or samples.max() > maxval:
        raise PgmFormatError("sample outside [0, maxval]")
    return samples.reshape(height, width), maxval


def write_pgm(path: str, samples: np.ndarray, maxval: int) -> None:
    """Write an ASCII P2 PGM file."""
    arr = np.asarray(samples)
    if arr.ndim != 2:
        raise ValueError("samples must be 2-D")
    if not 0 < maxval <= MAX_MAXVAL:
        raise ValueError(f"maxval {maxval} outside (0, {MAX_MAXVAL}]")
    if arr.min() < 0 or arr.max() > maxval:
        raise ValueError("sample outside [0, maxval]")
    lines = [f"P2\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n"]
    for row in arr:
        lines.append(" ".join(str(int(v)) for v in row) + "\n")
    with open(path, "w", encoding="ascii") as fh:
        fh.writelines(lines)


def quantize_levels(samples: np.ndarray, maxval: int, num_colors: int) -> np.ndarray:
    """Map raw source levels in [0, maxval] to gray-level indices in [0, N).

    Uses floor(level * N / (maxval + 1)), which is the identity map when
    maxval = N - 1 so generated scenes round-trip exactly.
    """
    if num_colors < 1:
        raise ValueError("num_colors must be positive")
    return (np.asarray(samples, dtype=np.int64) * num_colors) // (maxval + 1)
