"""Embedding and extraction of watermarks through chaotic iterations.

Payload bit k goes to the LSC at U-sequence term T + k, where T is the
number of mixing iterations: the recurrence first runs over the whole mixing
strategy, then over N further strategy elements drawn from the keystream
alone. In authenticated mode the mixing strategy depends on the MSCs, so any
MSC change moves every payload position through the doubling term.
"""

from typing import Final, Optional

import numpy as np
from pydantic import Field

from src.core.bitplane import extract_lsc, extract_msc, inject_lsc, lsc_capacity
from src.core.chaos import (
    derive_strategy,
    group_width,
    iterate_negation,
    mix_watermark,
)
from src.core.enums import CollisionPolicy, EmbedMode, StreamOrigin
from src.core.exceptions import (
    DimensionMismatchError,
    InsufficientStrategyError,
    PreconditionError,
)
from src.core.models import (
    ArrayModel,
    AuthenticationVerdict,
    BitStream,
    EmbedConfig,
    GrayImage,
    IntArray,
    SecretKey,
    StrategyStream,
    USequence,
    Watermark,
)
from src.core.utils import similarity
from src.infrastructure.logging.logger import setup_logger
from src.services.exceptions import (
    CapacityExceededError,
    MissingOriginalError,
    PositionExhaustedError,
)

logger = setup_logger(__name__)

DEFAULT_THRESHOLD: Final[float] = 95.0

Dimensions = tuple[int, int]


class EmbeddingSchedule(ArrayModel):
    """Mixing strategy and resolved LSC positions of one embedding."""

    mixing: StrategyStream
    positions: IntArray
    m: int = Field(ge=1)


def u_sequence(strategy: StrategyStream, m: int, count: int) -> USequence:
    if m < 1:
        raise ValueError("the LSC count must be at least 1")
    if count < 0 or len(strategy) < count:
        raise InsufficientStrategyError(
            f"U-sequence of {count} terms needs as many strategy elements, "
            f"got {len(strategy)}"
        )
    s = strategy.values[:count].tolist()
    values = np.empty(count, dtype=np.int64)
    if count:
        u = s[0] % m
        values[0] = u
        for n in range(count - 1):
            u = (s[n + 1] + 2 * u + n) % m
            values[n + 1] = u
    return USequence(values=values, m=m)


def resolve_position(
    u: int, used: set[int], policy: CollisionPolicy, m: int
) -> int:
    if policy is CollisionPolicy.OVERWRITE:
        used.add(u)
        return u
    if len(used) >= m:
        raise PositionExhaustedError(f"all {m} LSC positions are already taken")
    for j in range(m):
        candidate = (u + j) % m
        if candidate not in used:
            used.add(candidate)
            return candidate
    raise PositionExhaustedError(f"all {m} LSC positions are already taken")


def build_schedule(
    image: GrayImage, key: SecretKey, config: EmbedConfig, n: int
) -> EmbeddingSchedule:
    """Strategies and positions for an N-bit payload, MSCs taken from ``image``."""
    m = lsc_capacity(image, config.layout)
    if n > m:
        raise CapacityExceededError(n, m)
    # with no odd factor in M the doubling term dies out before T
    if key.authenticated and m & (m - 1) == 0:
        raise PreconditionError(
            f"authenticated mode needs an LSC count with an odd factor, got M={m}"
        )
    t = key.resolved_mix_iters(n)
    logger.debug(
        f"Schedule: N={n}, M={m}, T={t}, group width={group_width(n)}, "
        f"authenticated={key.authenticated}"
    )

    if key.authenticated:
        mixing = derive_strategy(key, extract_msc(image, config.layout), n, t)
        plain_key = key.model_copy(update={"authenticated": False})
        continuation = derive_strategy(plain_key, None, n, t + n).values[t:]
        driver = np.concatenate([mixing.values, continuation])
    else:
        plain = derive_strategy(key, None, n, t + n)
        mixing = StrategyStream(values=plain.values[:t], n=n)
        driver = plain.values

    terms = u_sequence(StrategyStream(values=driver, n=n), m, t + n).values[t:]
    used: set[int] = set()
    positions = np.fromiter(
        (
            resolve_position(int(u), used, config.collision_policy, m)
            for u in terms
        ),
        dtype=np.int64,
        count=n,
    )
    moved = int(np.count_nonzero(positions != terms))
    if config.collision_policy is CollisionPolicy.OVERWRITE and len(used) < n:
        logger.warning(
            f"{n - len(used)} payload positions collide and will be overwritten"
        )
    elif moved:
        logger.debug(f"Linear probing moved {moved} of {n} positions")
    return EmbeddingSchedule(mixing=mixing, positions=positions, m=m)


def _last_writes(positions: IntArray) -> IntArray:
    """Indices k whose write to positions[k] is not overwritten later."""
    reversed_first = np.unique(positions[::-1], return_index=True)[1]
    return np.sort(positions.size - 1 - reversed_first)


def _negated(image: GrayImage, config: EmbedConfig, positions: IntArray) -> GrayImage:
    lsc = extract_lsc(image, config.layout).bits
    flipped = iterate_negation(lsc, positions + 1)
    return inject_lsc(
        image, config.layout, BitStream(bits=flipped, origin=StreamOrigin.LSC)
    )


def embed(
    carrier: GrayImage, watermark: Watermark, key: SecretKey, config: EmbedConfig
) -> GrayImage:
    schedule = build_schedule(carrier, key, config, watermark.size)

    if config.mode is EmbedMode.NEGATE:
        watermarked = _negated(carrier, config, schedule.positions)
    else:
        mixed = mix_watermark(watermark, schedule.mixing).flat
        lsc = extract_lsc(carrier, config.layout).bits.copy()
        kept = _last_writes(schedule.positions)
        lsc[schedule.positions[kept]] = mixed[kept]
        watermarked = inject_lsc(
            carrier, config.layout, BitStream(bits=lsc, origin=StreamOrigin.LSC)
        )

    logger.info(
        f"Embedded {watermark.width}x{watermark.height} watermark into "
        f"{carrier.width}x{carrier.height} carrier "
        f"(mode={config.mode.value}, authenticated={key.authenticated})"
    )
    return watermarked


def extract(
    watermarked: GrayImage,
    key: SecretKey,
    config: EmbedConfig,
    dims: Dimensions,
    original: Optional[GrayImage] = None,
) -> Watermark:
    width, height = dims
    if width < 1 or height < 1:
        raise PreconditionError(f"invalid watermark dimensions {width}x{height}")
    if config.mode is EmbedMode.NEGATE and original is None:
        raise MissingOriginalError("negate mode extraction needs the original image")

    schedule = build_schedule(watermarked, key, config, width * height)
    lsc = extract_lsc(watermarked, config.layout).bits

    if config.mode is EmbedMode.NEGATE:
        assert original is not None
        if original.pixels.shape != watermarked.pixels.shape:
            raise DimensionMismatchError(
                f"original is {original.width}x{original.height}, "
                f"watermarked image is {watermarked.width}x{watermarked.height}"
            )
        reference = extract_lsc(original, config.layout).bits
        flips = reference[schedule.positions] ^ lsc[schedule.positions]
        extracted = Watermark.from_flat(flips, width, height)
    else:
        mixed = Watermark.from_flat(lsc[schedule.positions], width, height)
        extracted = mix_watermark(mixed, schedule.mixing)

    logger.debug(f"Extracted {width}x{height} watermark (mode={config.mode.value})")
    return extracted


def expected_flip_pattern(
    image: GrayImage, key: SecretKey, config: EmbedConfig, dims: Dimensions
) -> Watermark:
    """Negate-mode extraction of an intact image: visit parity per payload step."""
    width, height = dims
    schedule = build_schedule(image, key, config, width * height)
    _, inverse, counts = np.unique(
        schedule.positions, return_inverse=True, return_counts=True
    )
    return Watermark.from_flat(counts[inverse] % 2 == 1, width, height)


def restore_carrier(
    watermarked: GrayImage, key: SecretKey, config: EmbedConfig, dims: Dimensions
) -> GrayImage:
    if config.mode is not EmbedMode.NEGATE:
        raise PreconditionError("only negate mode embeddings can be undone")
    width, height = dims
    schedule = build_schedule(watermarked, key, config, width * height)
    logger.info(f"Restoring carrier from {width}x{height} negate-mode embedding")
    return _negated(watermarked, config, schedule.positions)


def authenticate(
    watermarked: GrayImage,
    reference: Optional[Watermark],
    key: SecretKey,
    config: EmbedConfig,
    dims: Optional[Dimensions] = None,
    original: Optional[GrayImage] = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> AuthenticationVerdict:
    """Check ``watermarked`` against its expected mark with an MSC-coupled key.

    Substitute mode compares the extraction with ``reference``; negate mode
    compares it with the flip pattern an intact image would yield.
    """
    if not key.authenticated:
        key = key.model_copy(update={"authenticated": True})

    if config.mode is EmbedMode.NEGATE:
        if dims is None:
            if reference is None:
                raise PreconditionError("negate mode needs watermark dimensions")
            dims = (reference.width, reference.height)
        expected = expected_flip_pattern(watermarked, key, config, dims)
    else:
        if reference is None:
            raise PreconditionError("substitute mode needs the reference watermark")
        expected = reference
        dims = (reference.width, reference.height)

    extracted = extract(watermarked, key, config, dims, original=original)
    verdict = AuthenticationVerdict(
        report=similarity(extracted, expected), threshold=threshold
    )
    if verdict.authentic:
        logger.info(f"Authentic: {verdict.report.percentage:.2f}% similarity")
    else:
        logger.warning(
            f"Tampering signalled: {verdict.report.percentage:.2f}% similarity "
            f"below {threshold:.2f}%"
        )
    return verdict
