"""Deterministic random streams.

Every stochastic routine in the package draws from a counter-based
generator keyed by a user seed plus string labels, so a given
(seed, labels) pair produces the same stream on every platform and
regardless of call order elsewhere in the process.
"""
from __future__ import annotations

import zlib

import numpy as np


def stream_key(*labels: str) -> tuple[int, ...]:
    return tuple(zlib.crc32(label.encode("utf8")) for label in labels)


def substream(seed: int, *labels: str) -> np.random.Generator:
    """Independent generator for the given seed and purpose labels."""
    ss = np.random.SeedSequence(seed, spawn_key=stream_key(*labels))
    return np.random.Generator(np.random.Philox(ss))
