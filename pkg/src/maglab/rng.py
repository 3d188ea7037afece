"""Counter-based random streams.

A stream is identified by a 64-bit key derived from ``(seed, purpose,
replication)``.  Draw ``i`` of a stream is ``mix64(key + (i + 1) * GAMMA)``,
the SplitMix64 output function evaluated at an arbitrary counter, so any
draw can be computed without generating the ones before it.  Replications
therefore never share state, and results do not depend on how they are
scheduled.

The scalar functions here are the reference definition; the compiled
kernels in :mod:`maglab._kernels` reproduce them exactly.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
TWO_POW_M53 = 1.0 / (1 << 53)

PURPOSE_GRAPH = 0x4D41475F47524150  # b"MAG_GRAP"


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, replication: int = 0, purpose: int = PURPOSE_GRAPH) -> int:
    if replication < 0:
        raise ValueError("replication index must be non-negative")
    k = mix64((seed & MASK64) + GAMMA)
    k = mix64(k ^ purpose)
    return mix64(k + (replication + 1) * GAMMA)


def raw(key: int, index: int) -> int:
    return mix64(key + (index + 1) * GAMMA)


def uniform(key: int, index: int) -> float:
    """Draw ``index`` of stream ``key`` as a double strictly inside (0, 1)."""
    return ((raw(key, index) >> 11) + 0.5) * TWO_POW_M53


def uniforms(key: int, start: int, count: int) -> np.ndarray:
    """Vectorised :func:`uniform` over ``start, ..., start + count - 1``."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(key) + idx * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    z = z ^ (z >> np.uint64(31))
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * TWO_POW_M53


def stream_keys(seed: int, replications: int, start: int = 0) -> np.ndarray:
    return np.array(
        [stream_key(seed, r) for r in range(start, start + replications)], dtype=np.uint64
    )
