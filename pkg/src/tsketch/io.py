"""Binary tensor file format.

A T3B file is the magic ``b"T3B1"``, then m, n, p as little-endian
unsigned 64-bit integers, then ``m*n*p`` little-endian float64 values in
storage order: column-major within a frontal slice, slices in order.
Readers reject wrong magic, truncated payloads, and non-finite values.
"""

import struct

import numpy as np

from .errors import FormatError

__all__ = ["read_t3b", "write_t3b"]

MAGIC = b"T3B1"
_DIMS = struct.Struct("<QQQ")


def write_block(f, a):
    """Write one T3B block (header plus payload) to an open binary file."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 3:
        raise FormatError(f"can only store 3-axis tensors, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise FormatError("refusing to write non-finite values")
    m, n, p = a.shape
    f.write(MAGIC)
    f.write(_DIMS.pack(m, n, p))
    f.write(np.asfortranarray(a).tobytes(order="F"))


def read_block(f):
    """Read one T3B block from an open binary file."""
    magic = f.read(4)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    header = f.read(_DIMS.size)
    if len(header) != _DIMS.size:
        raise FormatError("truncated header")
    m, n, p = _DIMS.unpack(header)
    if min(m, n, p) < 1:
        raise FormatError(f"invalid dimensions ({m}, {n}, {p})")
    count = m * n * p
    payload = f.read(8 * count)
    if len(payload) != 8 * count:
        raise FormatError(
            f"truncated payload: expected {8 * count} bytes, got {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f8", count=count)
    if not np.isfinite(data).all():
        raise FormatError("non-finite values in payload")
    return np.ascontiguousarray(data.reshape((m, n, p), order="F"))


def write_t3b(path, a):
    """Write a tensor to a standalone T3B file."""
    with open(path, "wb") as f:
        write_block(f, a)


def read_t3b(path):
    """Read a standalone T3B file, rejecting any trailing bytes."""
    with open(path, "rb") as f:
        a = read_block(f)
        if f.read(1):
            raise FormatError("trailing bytes after payload")
    return a
