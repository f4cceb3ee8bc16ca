"""Writer/reader for the engine's AEMB embedding file format.

Independent implementation of the published byte contract: magic "AEMB",
u32 version (=1), u32 dim, u64 count, then [u16 id_len][id utf-8]
[dim x f32], all little-endian.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Iterable

import numpy as np

MAGIC = b"AEMB"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")
_ID_LEN = struct.Struct("<H")


def write(records: Iterable[tuple[str, np.ndarray]], path: str | Path) -> int:
    path = Path(path)
    body = bytearray()
    dim = None
    count = 0
    for item_id, values in records:
        arr = np.asarray(values, dtype="<f4")
        if dim is None:
            dim = int(arr.shape[0])
        elif int(arr.shape[0]) != dim:
            raise ValueError(f"{item_id}: dim {arr.shape[0]} != {dim}")
        encoded = item_id.encode("utf-8")
        body += _ID_LEN.pack(len(encoded))
        body += encoded
        body += arr.tobytes()
        count += 1
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, dim if dim is not None else 0, count))
        fh.write(bytes(body))
    return count


def read(path: str | Path) -> tuple[int, list[tuple[str, np.ndarray]]]:
    data = Path(path).read_bytes()
    magic, version, dim, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC or version != VERSION:
        raise ValueError(f"{path}: not an AEMB v{VERSION} file")
    offset = _HEADER.size
    records = []
    for _ in range(count):
        (id_len,) = _ID_LEN.unpack_from(data, offset)
        offset += _ID_LEN.size
        item_id = data[offset : offset + id_len].decode("utf-8")
        offset += id_len
        vector = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).copy()
        offset += dim * 4
        records.append((item_id, vector))
    return int(dim), records
