"""Named derivation of random streams from one master seed.

Every consumer asks for ``rng(master, "component", index, ...)``; the stream
depends only on that path, so any part of a run can be replayed alone.
"""
from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part)


def seed_sequence(master: int, *path) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(master), spawn_key=tuple(_key(p) for p in path))


def rng(master: int, *path) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(master, *path))


def derive_seed(master: int, *path) -> int:
    """A plain 63-bit integer seed for the given path."""
    return int(seed_sequence(master, *path).generate_state(1, np.uint64)[0] >> np.uint64(1))
