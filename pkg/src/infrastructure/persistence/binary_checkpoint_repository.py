"""Named-tensor checkpoint file.

Layout (little-endian): magic ``NOLOCKPT``, version u32, tensor count u32;
then per tensor: name length u32, UTF-8 name, rank u32, dims u64 each,
float64 payload.
"""
import struct
from pathlib import Path
from typing import Dict

import numpy as np

from src.domain.exceptions import CheckpointFormatError
from src.domain.repositories.checkpoint_repository import CheckpointRepository
from src.infrastructure.persistence.files import atomic_write_bytes, atomic_write_json, read_json

MAGIC = b"NOLOCKPT"
VERSION = 1


def encode_checkpoint(tensors: Dict[str, np.ndarray]) -> bytes:
    parts = [MAGIC, struct.pack("<II", VERSION, len(tensors))]
    for name in sorted(tensors):
        array = np.ascontiguousarray(tensors[name], dtype="<f8")
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<I", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<I", array.ndim))
        parts.append(struct.pack(f"<{array.ndim}Q", *array.shape))
        parts.append(array.tobytes())
    return b"".join(parts)


def decode_checkpoint(data: bytes, source: str = "<bytes>") -> Dict[str, np.ndarray]:
    if data[:len(MAGIC)] != MAGIC:
        raise CheckpointFormatError(f"{source}: bad magic, not a checkpoint file")
    pos = len(MAGIC)

    def take(n: int) -> bytes:
        nonlocal pos
        if pos + n > len(data):
            raise CheckpointFormatError(f"{source}: truncated at byte {pos}")
        chunk = data[pos:pos + n]
        pos += n
        return chunk

    version, count = struct.unpack("<II", take(8))
    if version != VERSION:
        raise CheckpointFormatError(f"{source}: version {version}, expected {VERSION}")
    tensors: Dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<I", take(4))
        name = take(name_len).decode("utf-8")
        (rank,) = struct.unpack("<I", take(4))
        shape = struct.unpack(f"<{rank}Q", take(8 * rank))
        size = int(np.prod(shape, dtype=np.int64)) if rank else 1
        tensors[name] = np.frombuffer(take(8 * size), dtype="<f8").reshape(shape).astype(np.float64)
    if pos != len(data):
        raise CheckpointFormatError(f"{source}: {len(data) - pos} trailing bytes")
    return tensors


class BinaryCheckpointRepository(CheckpointRepository):
    def save(self, path: str, tensors: Dict[str, np.ndarray]) -> str:
        atomic_write_bytes(path, encode_checkpoint(tensors))
        return str(path)

    def load(self, path: str) -> Dict[str, np.ndarray]:
        return decode_checkpoint(Path(path).read_bytes(), str(path))

    def save_sidecar(self, path: str, payload: dict) -> str:
        sidecar = f"{path}.json"
        atomic_write_json(sidecar, payload)
        return sidecar

    def load_sidecar(self, path: str) -> dict:
        return read_json(f"{path}.json")

    def exists(self, path: str) -> bool:
        return Path(path).is_file()
