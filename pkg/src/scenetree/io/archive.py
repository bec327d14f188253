"""Binary embedding archives ("EMB1").

Layout, little-endian throughout:

    magic   4 bytes  "EMB1"
    dim     u32
    count   u32
    records, each: key_len u16, key utf-8, dim x f32

Keys are unique; record order is preserved on read so read→write round
trips are bit-identical. Keys follow the package conventions: crop keys
"{object_node}/{frame_id}/{level}", 2D-segment keys "{frame_id}/{seg2d_id}",
text keys are the raw query string.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import FormatError

_MAGIC = b"EMB1"


@dataclass
class EmbeddingArchive:
    dim: int
    records: dict[str, np.ndarray] = field(default_factory=dict)

    def add(self, key: str, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=np.float32).reshape(-1)
        if len(values) != self.dim:
            raise FormatError(
                f"record {key!r} has dim {len(values)}, archive expects {self.dim}"
            )
        if key in self.records:
            raise FormatError(f"duplicate archive key {key!r}")
        self.records[key] = values

    def __len__(self) -> int:
        return len(self.records)


def write_embedding_archive(archive: EmbeddingArchive, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", archive.dim, len(archive.records)))
        for key, values in archive.records.items():
            encoded = key.encode("utf-8")
            if len(encoded) > 0xFFFF:
                raise FormatError(f"archive key too long ({len(encoded)} bytes)")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(values.astype("<f4").tobytes())


def read_embedding_archive(path: str | Path) -> EmbeddingArchive:
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r}")
    if len(data) < 12:
        raise FormatError(f"{path}: truncated header")
    dim, count = struct.unpack_from("<II", data, 4)
    archive = EmbeddingArchive(dim=dim)
    offset = 12
    vec_bytes = dim * 4
    for i in range(count):
        if len(data) - offset < 2:
            raise FormatError(f"{path}: truncated at record {i}")
        (key_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if len(data) - offset < key_len + vec_bytes:
            raise FormatError(f"{path}: truncated at record {i}")
        key = data[offset:offset + key_len].decode("utf-8")
        offset += key_len
        values = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).copy()
        offset += vec_bytes
        if key in archive.records:
            raise FormatError(f"{path}: duplicate key {key!r}")
        archive.records[key] = values
    return archive
