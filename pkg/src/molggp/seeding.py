"""Deterministic seed derivation: every random stream is a pure function of
the master seed and a tuple of tags."""
from __future__ import annotations

import zlib

import numpy as np


def _tag(t) -> int:
    if isinstance(t, (int, np.integer)):
        return int(t) & 0xFFFFFFFF
    return zlib.crc32(str(t).encode("utf-8"))


def derive_rng(master_seed: int, *tags) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=tuple(_tag(t) for t in tags)))


def derive_seed(master_seed: int, *tags) -> int:
    return int(derive_rng(master_seed, *tags).integers(2**63 - 1))
