"""Counter-based SplitMix64 generator.

Output i is the SplitMix64 finalizer applied to ``seed + (i + 1) * GAMMA``
(mod 2**64), which is exactly the sequential generator unrolled, so a whole
block of outputs is produced in one vectorized pass.
"""

from typing import Final

import numpy as np
import numpy.typing as npt

from src.core.models import FloatArray

U64Array = npt.NDArray[np.uint64]

GAMMA: Final = np.uint64(0x9E3779B97F4A7C15)
MIX_1: Final = np.uint64(0xBF58476D1CE4E5B9)
MIX_2: Final = np.uint64(0x94D049BB133111EB)
MASK_64: Final[int] = (1 << 64) - 1


def splitmix64(seed: int, count: int) -> U64Array:
    counters = np.arange(1, count + 1, dtype=np.uint64)
    z = counters * GAMMA + np.uint64(seed & MASK_64)
    z = (z ^ (z >> np.uint64(30))) * MIX_1
    z = (z ^ (z >> np.uint64(27))) * MIX_2
    return z ^ (z >> np.uint64(31))


def uniform(seed: int, count: int) -> FloatArray:
    """Uniform doubles in [0, 1) built from the top 53 bits of each output."""
    return (splitmix64(seed, count) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def standard_normal(seed: int, count: int) -> FloatArray:
    """N(0, 1) samples by the Box-Muller transform, both branches used."""
    pairs = (count + 1) // 2
    u = uniform(seed, 2 * pairs)
    radius = np.sqrt(-2.0 * np.log(1.0 - u[0::2]))
    angle = 2.0 * np.pi * u[1::2]
    samples = np.empty(2 * pairs, dtype=np.float64)
    samples[0::2] = radius * np.cos(angle)
    samples[1::2] = radius * np.sin(angle)
    return samples[:count]
