"""Reader and writer for the CMAT binary matrix format.

Layout (all little-endian)::

    offset  size  content
    0       4     magic b"CMX1"
    4       8     rows, uint64
    12      8     cols, uint64
    20      16*rows*cols  entries, row-major; each entry is the real part
                          then the imaginary part as IEEE-754 binary64

Vectors are stored as ``cols == 1``. Round trips are bit-exact.
"""

import struct

import numpy as np

from .errors import DimensionError, FormatError

__all__ = ['write_cmat', 'read_cmat', 'write_cvec', 'read_cvec', 'MAGIC']

MAGIC = b'CMX1'
_HEADER = struct.Struct('<4sQQ')
_ENTRY = np.dtype('<c16')


def write_cmat(path, A):
    A = np.asarray(A)
    if A.ndim != 2:
        raise DimensionError(f"write_cmat expects a 2-D array, got ndim={A.ndim}")
    rows, cols = A.shape
    with open(path, 'wb') as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols))
        fh.write(np.ascontiguousarray(A, dtype=_ENTRY).tobytes())


def read_cmat(path):
    with open(path, 'rb') as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise FormatError(
            f"{path}: file too short for a CMAT header ({len(raw)} bytes)",
            offset=len(raw))
    magic, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}", offset=0)
    expected = _HEADER.size + rows * cols * _ENTRY.itemsize
    if len(raw) < expected:
        raise FormatError(
            f"{path}: truncated payload, header declares {rows}x{cols} "
            f"entries ({expected} bytes) but file has {len(raw)} bytes",
            offset=len(raw))
    if len(raw) > expected:
        raise FormatError(f"{path}: {len(raw) - expected} trailing bytes",
                          offset=expected)
    data = np.frombuffer(raw, dtype=_ENTRY, count=rows * cols,
                         offset=_HEADER.size)
    return data.astype(np.complex128).reshape(rows, cols)


def write_cvec(path, x):
    x = np.asarray(x)
    if x.ndim != 1:
        raise DimensionError(f"write_cvec expects a 1-D array, got ndim={x.ndim}")
    write_cmat(path, x.reshape(-1, 1))


def read_cvec(path):
    A = read_cmat(path)
    if A.shape[1] != 1:
        raise FormatError(f"{path}: expected a vector (cols=1), got {A.shape}",
                          offset=12)
    return A[:, 0].copy()
