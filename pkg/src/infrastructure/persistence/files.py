"""Atomic file writes, PGM frame codec and dataset directory layout."""
import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Union

import numpy as np

from src.domain.entities.frame import Frame
from src.domain.exceptions import CorruptFrameError, FormatVersionError

FORMAT_VERSION = 1

PathLike = Union[str, Path]


def atomic_write_bytes(path: PathLike, data: bytes):
    """Write to a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path: PathLike, payload: Any):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    atomic_write_bytes(path, text.encode("utf-8"))


def read_json(path: PathLike) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def check_version(payload: dict, path: PathLike, expected: int = FORMAT_VERSION):
    version = payload.get("format_version")
    if version != expected:
        raise FormatVersionError(f"{path}: format_version {version!r}, expected {expected}")


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def encode_pgm(frame: Frame) -> bytes:
    """Binary (P5) 8-bit PGM."""
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.to_bytes().tobytes()


def decode_pgm(data: bytes, frame_index: int = 0) -> Frame:
    tokens = []
    pos = 0
    try:
        while len(tokens) < 4:
            while data[pos:pos + 1].isspace():
                pos += 1
            if data[pos:pos + 1] == b"#":
                while data[pos:pos + 1] not in (b"\n", b""):
                    pos += 1
                continue
            start = pos
            while pos < len(data) and not data[pos:pos + 1].isspace():
                pos += 1
            if start == pos:
                raise IndexError
            tokens.append(data[start:pos])
        pos += 1
        magic = tokens[0]
        width, height, maxval = (int(t) for t in tokens[1:])
    except (IndexError, ValueError):
        raise CorruptFrameError(f"Frame {frame_index}: malformed PGM header", frame_index)
    if magic != b"P5" or maxval != 255:
        raise CorruptFrameError(f"Frame {frame_index}: not an 8-bit binary PGM", frame_index)
    payload = data[pos:]
    if len(payload) != width * height:
        raise CorruptFrameError(
            f"Frame {frame_index}: expected {width * height} pixel bytes, found {len(payload)}",
            frame_index
        )
    return Frame.from_bytes(np.frombuffer(payload, dtype=np.uint8).reshape(height, width))


class DatasetLayout:
    """Paths under a dataset root."""

    def __init__(self, root: PathLike):
        self.root = Path(root)

    def scene(self, scene_id: str) -> Path:
        return self.root / "scenes" / f"{scene_id}.json"

    def video_dir(self, video_id: str) -> Path:
        return self.root / "videos" / video_id

    def goal_dir(self, scene_id: str, object_id: str) -> Path:
        return self.root / "goals" / scene_id / object_id

    def labels(self, video_id: str, decoder: str) -> Path:
        return self.root / "labels" / f"{video_id}.{decoder}.json"

    @property
    def manifest(self) -> Path:
        return self.root / "manifest.json"

    @property
    def runs(self) -> Path:
        return self.root / "runs"

    @property
    def results(self) -> Path:
        return self.root / "results"
