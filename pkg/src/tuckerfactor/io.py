"""Binary tensor-series file format.

Layout (all integers little-endian, independent of host byte order):

    offset  size  field
    0       4     magic bytes ``TNSF``
    4       1     format version (currently 1)
    5       1     D, number of tensor modes (1..255)
    6       2     reserved, must be zero
    8       8     u64 T, number of tensors
    16      8*D   u64 dims p_1 .. p_D
    16+8D   8*T*p f64 payload; tensor t contiguous, first index fastest

Loading matrices are stored in the same container as 2-way tensors with
T = 1, one file per mode with suffixes ``.A1``, ``.A2``, ...
"""

from __future__ import annotations

import math
import struct

import numpy as np

MAGIC = b"TNSF"
VERSION = 1
_HEADER_FIXED = 16  # magic + version + D + reserved + T


class TensorSeriesFormatError(Exception):
    """Malformed tensor-series file."""


class BadMagicError(TensorSeriesFormatError):
    """Leading magic bytes are not ``TNSF``."""


class VersionMismatchError(TensorSeriesFormatError):
    """Recognized container but unsupported format version."""


class PayloadSizeError(TensorSeriesFormatError):
    """Header dims and payload length disagree."""


def write_tensor_series(path, series) -> None:
    """Write a series of equal-shape tensors to ``path``.

    ``series`` is an array of shape ``(T, p_1, ..., p_D)`` (or a list of
    T equal-shape tensors).  Values are stored as little-endian f64; the
    round trip through :func:`read_tensor_series` is bit-exact.
    """
    arr = np.asarray(series, dtype=float)
    if arr.ndim < 2:
        raise ValueError("series must have shape (T, p_1, ..., p_D)")
    t_len = arr.shape[0]
    dims = arr.shape[1:]
    d_count = len(dims)
    if t_len < 1:
        raise ValueError("series is empty")
    if d_count > 255:
        raise ValueError("at most 255 modes supported")
    header = MAGIC + bytes([VERSION, d_count, 0, 0]) + struct.pack("<Q", t_len)
    header += struct.pack(f"<{d_count}Q", *dims)
    with open(path, "wb") as fh:
        fh.write(header)
        for t in range(t_len):
            fh.write(arr[t].ravel(order="F").astype("<f8", copy=False).tobytes())


def read_tensor_series(path) -> np.ndarray:
    """Read a tensor series written by :func:`write_tensor_series`.

    Returns an array of shape ``(T, p_1, ..., p_D)``.  Raises
    :class:`BadMagicError`, :class:`VersionMismatchError` or
    :class:`PayloadSizeError` on corrupted files, each naming the byte
    offset of the problem.
    """
    with open(path, "rb") as fh:
        head = fh.read(_HEADER_FIXED)
        if len(head) < _HEADER_FIXED:
            raise PayloadSizeError(
                f"file ends at byte {len(head)}, expected at least "
                f"{_HEADER_FIXED} header bytes"
            )
        if head[:4] != MAGIC:
            raise BadMagicError(
                f"bad magic {head[:4]!r} at byte offset 0, expected {MAGIC!r}"
            )
        version = head[4]
        if version != VERSION:
            raise VersionMismatchError(
                f"unsupported version {version} at byte offset 4, expected {VERSION}"
            )
        d_count = head[5]
        if d_count < 1:
            raise PayloadSizeError("mode count of zero at byte offset 5")
        if head[6:8] != b"\x00\x00":
            raise TensorSeriesFormatError(
                "reserved bytes at offset 6 are not zero"
            )
        (t_len,) = struct.unpack("<Q", head[8:16])
        if t_len < 1:
            raise PayloadSizeError("tensor count of zero at byte offset 8")
        dim_bytes = fh.read(8 * d_count)
        if len(dim_bytes) < 8 * d_count:
            raise PayloadSizeError(
                f"file ends at byte {_HEADER_FIXED + len(dim_bytes)}, expected "
                f"{d_count} dimension entries"
            )
        dims = struct.unpack(f"<{d_count}Q", dim_bytes)
        if any(p < 1 for p in dims):
            raise PayloadSizeError(f"zero dimension in header dims {dims}")
        payload_offset = _HEADER_FIXED + 8 * d_count
        p = math.prod(dims)
        expected = t_len * p * 8
        data = np.fromfile(fh, dtype="<f8", count=t_len * p)
        if data.size < t_len * p:
            raise PayloadSizeError(
                f"payload starting at byte {payload_offset} holds "
                f"{data.size * 8} bytes, header declares {expected}"
            )
        if fh.read(1):
            raise PayloadSizeError(
                f"trailing bytes after declared payload of {expected} bytes "
                f"at offset {payload_offset}"
            )
    d = len(dims)
    # per-tensor buffers are Fortran order: reshape reversed dims, then
    # swap the tensor axes back into place
    out = data.reshape((t_len,) + dims[::-1])
    out = out.transpose((0,) + tuple(range(d, 0, -1)))
    return np.ascontiguousarray(out.astype(float, copy=False))


def write_loadings(prefix, loadings) -> list[str]:
    """Persist loading matrices as ``<prefix>.A1``, ``<prefix>.A2``, ...

    Each matrix is stored as a 2-way tensor series with T = 1.  Returns
    the written paths.
    """
    paths = []
    for d, a in enumerate(loadings):
        a = np.asarray(a, dtype=float)
        if a.ndim != 2:
            raise ValueError("loadings must be matrices")
        path = f"{prefix}.A{d + 1}"
        write_tensor_series(path, a[np.newaxis, :, :])
        paths.append(path)
    return paths


def read_loadings(prefix) -> list[np.ndarray]:
    """Read the ``.A1``, ``.A2``, ... loading files written by
    :func:`write_loadings`."""
    loadings = []
    d = 1
    while True:
        path = f"{prefix}.A{d}"
        try:
            fh = open(path, "rb")
        except FileNotFoundError:
            break
        fh.close()
        arr = read_tensor_series(path)
        if arr.ndim != 3 or arr.shape[0] != 1:
            raise TensorSeriesFormatError(
                f"{path} does not hold a single loading matrix"
            )
        loadings.append(arr[0])
        d += 1
    if not loadings:
        raise FileNotFoundError(f"no loading files found at {prefix}.A1, ...")
    return loadings
