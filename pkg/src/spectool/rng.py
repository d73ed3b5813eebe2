"""Deterministic counter-based random streams.

Every draw is a pure function of (seed, stream tag, element index, counter),
pushed through the splitmix64 finalizer. Streams carry no state, so per-pixel
sampling is order-independent and parallel-safe, and any run with the same
seed reproduces its output bit for bit.

The same mixing function exists in three forms that agree exactly: scalar
Python ints (shuffles and other small jobs), vectorized numpy uint64 (keying
per-pixel streams), and a numba copy inside :mod:`spectool.kernels`.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1ED4AE1D
_MIX_B = 0x94D049BB133111EB

# Stream tags keep draws for unrelated purposes disjoint.
TAG_PHOTON = 0x70686F746F6E2121
TAG_PLAN = 0x706C616E21212121

U64_GOLDEN = np.uint64(_GOLDEN)
U64_MIX_A = np.uint64(_MIX_A)
U64_MIX_B = np.uint64(_MIX_B)

#: scale mapping a 53-bit integer (plus half) into the open interval (0, 1)
TWO_NEG53 = 2.0**-53


def mix64(z: int) -> int:
    """splitmix64 finalizer on a Python int, wrapped to 64 bits."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix64_np(z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64` over a uint64 array."""
    z = z + U64_GOLDEN
    z = (z ^ (z >> np.uint64(30))) * U64_MIX_A
    z = (z ^ (z >> np.uint64(27))) * U64_MIX_B
    return z ^ (z >> np.uint64(31))


def unit_float(h: int) -> float:
    """Map a 64-bit hash to a double strictly inside (0, 1)."""
    return ((h >> 11) + 0.5) * TWO_NEG53


def unit_float_np(h: np.ndarray) -> np.ndarray:
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * TWO_NEG53


def stream_key(seed: int, tag: int) -> int:
    """Root key for one purpose-tagged stream of a seed."""
    return mix64((seed & _MASK64) ^ tag)


def element_keys(seed: int, tag: int, count: int) -> np.ndarray:
    """Per-element stream keys mix(stream ^ index), index = 0..count-1."""
    base = np.uint64(stream_key(seed, tag))
    idx = np.arange(count, dtype=np.uint64)
    return mix64_np(base ^ idx)
