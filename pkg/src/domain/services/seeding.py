"""Counter-based random streams.

Every stochastic component draws from a generator keyed by an explicit tuple
(global seed, purpose, scene, step, lane, ...) so parallel execution order
never changes what gets sampled.
"""
import zlib
from typing import Union

import numpy as np

SeedPart = Union[int, str]


def _as_int(part: SeedPart) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if part < 0:
        raise ValueError(f"Seed components must be non-negative, got {part}")
    return int(part)


def derive_seed(*parts: SeedPart) -> int:
    """Fold seed components into a single 31-bit seed."""
    sequence = np.random.SeedSequence([_as_int(p) for p in parts])
    return int(sequence.generate_state(1)[0] & 0x7FFFFFFF)


def rng_for(*parts: SeedPart) -> np.random.Generator:
    return np.random.default_rng([_as_int(p) for p in parts])
