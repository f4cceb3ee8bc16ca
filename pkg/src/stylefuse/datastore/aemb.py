"""AEMB: the engine's binary embedding file format.

Layout, all little-endian:

    magic   4 bytes  b"AEMB"
    version u32      currently 1
    dim     u32      vector length
    count   u64      number of records
    records count times:
        id_len  u16
        id      id_len bytes, UTF-8
        values  dim * f32

Reads are bit-exact: vectors come back as the stored float32 payload, so
write -> read -> write reproduces the file byte for byte. Normalization
policy lives in the catalog loader, not here.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from stylefuse.errors import DimensionMismatch, DuplicateItemId, FormatError

MAGIC = b"AEMB"
VERSION = 1

_HEADER = struct.Struct("<4sIIQ")
_ID_LEN = struct.Struct("<H")


def write_embeddings(
    records: Iterable[tuple[str, Sequence[float] | np.ndarray]],
    path: str | Path,
) -> int:
    """Write (item_id, vector) records; returns the record count.

    Vectors must share one dimension and be finite; values are stored as
    little-endian float32 exactly as given (after float32 cast).
    """
    path = Path(path)
    body = bytearray()
    dim: int | None = None
    count = 0
    for item_id, values in records:
        arr = np.asarray(values, dtype="<f4")
        if arr.ndim != 1:
            raise DimensionMismatch(f"vector for {item_id!r} is not 1-d")
        if dim is None:
            dim = int(arr.shape[0])
        elif int(arr.shape[0]) != dim:
            raise DimensionMismatch(
                f"vector for {item_id!r} has dim {arr.shape[0]}, expected {dim}"
            )
        if not np.all(np.isfinite(arr)):
            raise FormatError(f"vector for {item_id!r} contains NaN or Inf")
        encoded = item_id.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise FormatError(f"item_id too long: {len(encoded)} bytes")
        body += _ID_LEN.pack(len(encoded))
        body += encoded
        body += arr.tobytes()
        count += 1
    if dim is None:
        dim = 0
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, dim, count))
        fh.write(bytes(body))
    return count


def read_embeddings(path: str | Path) -> tuple[int, list[tuple[str, np.ndarray]]]:
    """Read an AEMB file; returns (dim, records) in file order, bit-exact.

    Raises FormatError on bad magic/version/truncation and DuplicateItemId
    when the same id appears twice.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(data)} bytes)")
    magic, version, dim, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")

    offset = _HEADER.size
    vec_bytes = dim * 4
    records: list[tuple[str, np.ndarray]] = []
    seen: set[str] = set()
    for index in range(count):
        if offset + _ID_LEN.size > len(data):
            raise FormatError(f"{path}: truncated at record {index}")
        (id_len,) = _ID_LEN.unpack_from(data, offset)
        offset += _ID_LEN.size
        if offset + id_len + vec_bytes > len(data):
            raise FormatError(f"{path}: truncated at record {index}")
        item_id = data[offset : offset + id_len].decode("utf-8")
        offset += id_len
        vector = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).copy()
        offset += vec_bytes
        if item_id in seen:
            raise DuplicateItemId(item_id, where=str(path))
        seen.add(item_id)
        records.append((item_id, vector))
    if offset != len(data):
        raise FormatError(f"{path}: {len(data) - offset} trailing bytes")
    return int(dim), records
