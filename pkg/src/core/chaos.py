"""Logistic-map keystreams, strategies and chaotic iterations over Boolean vectors."""

from typing import Callable, Final, Optional

import numpy as np

from src.core.enums import StreamOrigin
from src.core.exceptions import DimensionMismatchError, MissingMscError
from src.core.models import (
    BitStream,
    BoolArray,
    ChaoticState,
    IntArray,
    SecretKey,
    StrategyStream,
    Watermark,
)

IterateFunction = Callable[[BoolArray], BoolArray]

BIT_THRESHOLD: Final[float] = 0.5


def logistic_next(mu: float, x: float) -> float:
    return mu * x * (1.0 - x)


def keystream(key: SecretKey, length: int) -> BitStream:
    """Emit one bit per logistic iterate after ``key.burn_in`` discarded ones.

    Plain Python floats keep every step in IEEE 754 binary64, so the stream is
    reproducible wherever the key is.
    """
    if length < 1:
        raise ValueError("keystream length must be at least 1")
    mu, x = key.mu, key.u0
    for _ in range(key.burn_in):
        x = logistic_next(mu, x)
    out = bytearray(length)
    for i in range(length):
        x = logistic_next(mu, x)
        out[i] = x >= BIT_THRESHOLD
    bits = np.frombuffer(bytes(out), dtype=np.uint8).astype(np.bool_)
    return BitStream(bits=bits, origin=StreamOrigin.KEYSTREAM)


def group_width(n: int) -> int:
    """Bits per strategy element: ceil(log2 n), at least one."""
    return max(1, (n - 1).bit_length())


def fold_cyclic(bits: BoolArray, length: int) -> BoolArray:
    """Lay ``bits`` cyclically over ``length`` slots, XOR-ing overlapping bits.

    A shorter stream repeats; a longer one wraps around and accumulates, so
    every input bit reaches exactly one slot per lap.
    """
    if bits.size <= length:
        return np.resize(bits, length)
    laps = -(-bits.size // length)
    padded = np.zeros(laps * length, dtype=np.bool_)
    padded[: bits.size] = bits
    return np.bitwise_xor.reduce(padded.reshape(laps, length), axis=0)


def derive_strategy(
    key: SecretKey, msc: Optional[BitStream], n: int, count: int
) -> StrategyStream:
    if n < 1 or count < 1:
        raise ValueError("strategy needs a system size and a length of at least 1")
    width = group_width(n)
    source = keystream(key, count * width).bits
    if key.authenticated:
        if msc is None or len(msc) == 0:
            raise MissingMscError("authenticated strategy needs a non-empty MSC stream")
        source = source ^ fold_cyclic(msc.bits, source.size)
    weights = np.left_shift(1, np.arange(width - 1, -1, -1, dtype=np.int64))
    groups = source.reshape(count, width).astype(np.int64) @ weights
    return StrategyStream(values=groups % n + 1, n=n)


def vectorial_negation(x: BoolArray) -> BoolArray:
    return np.logical_not(x)


def identity_map(x: BoolArray) -> BoolArray:
    return x.copy()


def chaotic_iterate(
    state: ChaoticState, s: int, f: IterateFunction
) -> ChaoticState:
    """One step: only component ``s`` (1-based) takes its value from f(x)."""
    if not 1 <= s <= state.x.size:
        raise ValueError(f"strategy element {s} outside [1, {state.x.size}]")
    x = state.x.copy()
    x[s - 1] = f(state.x)[s - 1]
    return ChaoticState(x=x, step=state.step + 1)


def iterate_negation(x: BoolArray, strategy: IntArray) -> BoolArray:
    """Chaotic iterations with f0 over a whole strategy, computed by parity.

    Component i ends up flipped iff i occurs an odd number of times.
    """
    if strategy.size and (strategy.min() < 1 or strategy.max() > x.size):
        raise ValueError(f"strategy elements must lie in [1, {x.size}]")
    visits = np.bincount(strategy - 1, minlength=x.size)
    return np.logical_xor(x, visits % 2 == 1)


def mix_watermark(watermark: Watermark, strategy: StrategyStream) -> Watermark:
    if strategy.n != watermark.size:
        raise DimensionMismatchError(
            f"strategy addresses {strategy.n} cells, watermark has {watermark.size}"
        )
    mixed = iterate_negation(watermark.flat, strategy.values)
    return Watermark.from_flat(mixed, watermark.width, watermark.height)
