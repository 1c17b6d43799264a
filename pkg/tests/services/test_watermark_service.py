import numpy as np
import pytest

from src.core.bitplane import extract_lsc, extract_msc
from src.core.chaos import derive_strategy
from src.core.enums import CollisionPolicy, EmbedMode
from src.core.exceptions import (
    DimensionMismatchError,
    InsufficientStrategyError,
    PreconditionError,
)
from src.core.models import (
    BitPlaneLayout,
    EmbedConfig,
    GrayImage,
    SecretKey,
    StrategyStream,
    Watermark,
)
from src.core.utils import psnr, similarity
from src.infrastructure.corpus import synthetic_carrier, synthetic_logo
from src.services.exceptions import (
    CapacityExceededError,
    MissingOriginalError,
    PositionExhaustedError,
)
from src.services.watermark_service import (
    authenticate,
    build_schedule,
    embed,
    expected_flip_pattern,
    extract,
    resolve_position,
    restore_carrier,
    u_sequence,
)

SUBSTITUTE = EmbedConfig()
NEGATE = EmbedConfig(mode=EmbedMode.NEGATE)
KEY = SecretKey(mu=3.99, u0=0.3183)
AUTH_KEY = SecretKey(mu=3.99, u0=0.3183, authenticated=True)


def random_carrier(rng, size):
    return GrayImage(pixels=rng.integers(0, 256, size=(size, size), dtype=np.uint8))


def random_watermark(rng, size):
    return Watermark(bits=rng.integers(0, 2, size=(size, size)))


def random_key(rng, authenticated=False):
    return SecretKey(
        mu=float(rng.uniform(3.7, 3.99)),
        u0=float(rng.uniform(0.01, 0.99)),
        authenticated=authenticated,
    )


@pytest.fixture(scope="module")
def carrier():
    return synthetic_carrier()


@pytest.fixture(scope="module")
def logo():
    return synthetic_logo()


class TestUSequence:
    def test_direct_recurrence(self):
        strategy = StrategyStream(values=[5, 3], n=5)
        assert u_sequence(strategy, 10, 2).values.tolist() == [5, 3]

    def test_modulo_two(self):
        strategy = StrategyStream(values=[1, 1, 1], n=1)
        assert u_sequence(strategy, 2, 3).values.tolist() == [1, 1, 0]

    def test_first_term_shift_doubles(self):
        m = 1_000_000_007
        rng = np.random.default_rng(12)
        values = rng.integers(1, 100, size=20)
        shifted = values.copy()
        shifted[0] += 1
        u = u_sequence(StrategyStream(values=values, n=100), m, 20).values
        v = u_sequence(StrategyStream(values=shifted, n=100), m, 20).values
        assert ((v - u) % m).tolist() == [2**n for n in range(20)]

    def test_rejects_short_strategy(self):
        with pytest.raises(InsufficientStrategyError):
            u_sequence(StrategyStream(values=[1], n=1), 4, 2)


class TestResolvePosition:
    def test_free_position(self):
        assert resolve_position(3, set(), CollisionPolicy.PROBE, 10) == 3

    def test_linear_probe(self):
        used = {3, 4}
        assert resolve_position(3, used, CollisionPolicy.PROBE, 10) == 5
        assert used == {3, 4, 5}

    def test_probe_wraps_around(self):
        assert resolve_position(3, {3}, CollisionPolicy.PROBE, 4) == 0

    def test_exhaustion(self):
        with pytest.raises(PositionExhaustedError):
            resolve_position(1, {0, 1, 2, 3}, CollisionPolicy.PROBE, 4)

    def test_overwrite_keeps_collisions(self):
        assert resolve_position(3, {3}, CollisionPolicy.OVERWRITE, 10) == 3


class TestSchedule:
    def test_probe_positions_are_distinct(self):
        image = random_carrier(np.random.default_rng(1), 6)
        schedule = build_schedule(image, KEY, SUBSTITUTE, 100)
        assert len(set(schedule.positions.tolist())) == 100
        assert schedule.m == 108
        assert len(schedule.mixing) == 200

    def test_overwrite_keeps_raw_terms(self):
        image = random_carrier(np.random.default_rng(1), 6)
        config = EmbedConfig(collision_policy=CollisionPolicy.OVERWRITE)
        schedule = build_schedule(image, KEY, config, 100)
        # T defaults to 2N = 200; payload bits use terms 200..299
        driver = derive_strategy(KEY, None, 100, 300)
        terms = u_sequence(driver, 108, 300).values[200:]
        assert schedule.positions.tolist() == terms.tolist()

    def test_capacity_error_names_both_sizes(self):
        image = GrayImage(pixels=np.zeros((4, 4), dtype=np.uint8))
        with pytest.raises(CapacityExceededError, match="N=49.*M=48"):
            embed(image, Watermark(bits=np.ones((7, 7), dtype=bool)), KEY, SUBSTITUTE)

    @pytest.mark.parametrize("lsc_mask", [0x01, 0x06, 0x0F])
    def test_authenticated_mode_rejects_power_of_two_capacity(self, lsc_mask):
        config = EmbedConfig(
            layout=BitPlaneLayout(msc_mask=0xF0, lsc_mask=lsc_mask)
        )
        image = random_carrier(np.random.default_rng(1), 16)
        with pytest.raises(PreconditionError, match="odd factor"):
            build_schedule(image, AUTH_KEY, config, 64)
        assert len(build_schedule(image, KEY, config, 64).positions) == 64

    def test_authenticated_schedule_follows_msc(self):
        rng = np.random.default_rng(2)
        image = random_carrier(rng, 32)
        pixels = image.pixels.copy()
        pixels[5, 5] ^= 0x80
        tampered = GrayImage(pixels=pixels)
        before = build_schedule(image, AUTH_KEY, SUBSTITUTE, 256).positions
        after = build_schedule(tampered, AUTH_KEY, SUBSTITUTE, 256).positions
        plain_before = build_schedule(image, KEY, SUBSTITUTE, 256).positions
        plain_after = build_schedule(tampered, KEY, SUBSTITUTE, 256).positions
        assert np.array_equal(plain_before, plain_after)
        assert np.count_nonzero(before != after) > 200


class TestSubstitute:
    def test_round_trip_is_exact_on_random_triples(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            carrier = random_carrier(rng, 64)
            watermark = random_watermark(rng, 16)
            for authenticated in (False, True):
                key = random_key(rng, authenticated)
                watermarked = embed(carrier, watermark, key, SUBSTITUTE)
                extracted = extract(watermarked, key, SUBSTITUTE, (16, 16))
                assert similarity(extracted, watermark).percentage == 100.0

    def test_only_payload_lsc_bits_change(self, carrier, logo):
        watermarked = embed(carrier, logo, AUTH_KEY, SUBSTITUTE)
        assert extract_msc(watermarked, SUBSTITUTE.layout) == extract_msc(
            carrier, SUBSTITUTE.layout
        )
        changed = np.count_nonzero(
            extract_lsc(watermarked, SUBSTITUTE.layout).bits
            != extract_lsc(carrier, SUBSTITUTE.layout).bits
        )
        assert 0 < changed <= 4096

    def test_imperceptible_on_shipped_carrier(self, carrier):
        rng = np.random.default_rng(3)
        for _ in range(20):
            watermarked = embed(carrier, random_watermark(rng, 64), KEY, SUBSTITUTE)
            assert psnr(carrier, watermarked) >= 37.0

    def test_wrong_key_gives_chance_similarity(self, carrier, logo):
        watermarked = embed(carrier, logo, KEY, SUBSTITUTE)
        wrong = KEY.model_copy(update={"u0": KEY.u0 + 1e-9})
        extracted = extract(watermarked, wrong, SUBSTITUTE, (64, 64))
        assert 45.0 <= similarity(extracted, logo).percentage <= 55.0

    def test_tiny_key_offsets_give_chance_similarity(self, carrier, logo):
        rng = np.random.default_rng(10)
        for _ in range(10):
            key = random_key(rng)
            watermarked = embed(carrier, logo, key, SUBSTITUTE)
            nudged = key.model_copy(update={"u0": key.u0 + 1e-12})
            extracted = extract(watermarked, nudged, SUBSTITUTE, (64, 64))
            assert 45.0 <= similarity(extracted, logo).percentage <= 55.0

    def test_single_msc_flip_breaks_authenticated_extraction(self, carrier, logo):
        watermarked = embed(carrier, logo, AUTH_KEY, SUBSTITUTE)
        rng = np.random.default_rng(4)
        for _ in range(20):
            row, column = rng.integers(0, 256, size=2)
            bit = 0x80 >> int(rng.integers(0, 4))
            pixels = watermarked.pixels.copy()
            pixels[row, column] ^= bit
            extracted = extract(
                GrayImage(pixels=pixels), AUTH_KEY, SUBSTITUTE, (64, 64)
            )
            assert similarity(extracted, logo).percentage <= 60.0

    def test_rejects_invalid_dimensions(self, carrier):
        with pytest.raises(PreconditionError, match="0x4"):
            extract(carrier, KEY, SUBSTITUTE, (0, 4))


class TestNegate:
    def test_embedding_twice_restores_carrier(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            carrier = random_carrier(rng, 32)
            watermark = random_watermark(rng, 8)
            key = random_key(rng, authenticated=bool(rng.integers(0, 2)))
            once = embed(carrier, watermark, key, NEGATE)
            twice = embed(once, watermark, key, NEGATE)
            assert twice == carrier

    def test_restore_carrier(self):
        rng = np.random.default_rng(6)
        carrier = random_carrier(rng, 16)
        watermarked = embed(carrier, random_watermark(rng, 8), AUTH_KEY, NEGATE)
        assert watermarked != carrier
        assert restore_carrier(watermarked, AUTH_KEY, NEGATE, (8, 8)) == carrier

    def test_restore_needs_negate_mode(self, carrier):
        with pytest.raises(PreconditionError, match="negate"):
            restore_carrier(carrier, KEY, SUBSTITUTE, (8, 8))

    def test_extraction_yields_flip_pattern(self):
        rng = np.random.default_rng(7)
        carrier = random_carrier(rng, 16)
        watermarked = embed(carrier, random_watermark(rng, 8), KEY, NEGATE)
        extracted = extract(watermarked, KEY, NEGATE, (8, 8), original=carrier)
        assert extracted.bits.all()
        assert extracted == expected_flip_pattern(carrier, KEY, NEGATE, (8, 8))

    def test_overwrite_flip_pattern_follows_visit_parity(self):
        rng = np.random.default_rng(8)
        carrier = random_carrier(rng, 4)
        config = EmbedConfig(
            mode=EmbedMode.NEGATE, collision_policy=CollisionPolicy.OVERWRITE
        )
        watermarked = embed(carrier, random_watermark(rng, 6), KEY, config)
        extracted = extract(watermarked, KEY, config, (6, 6), original=carrier)
        assert extracted == expected_flip_pattern(carrier, KEY, config, (6, 6))

    def test_extraction_needs_original(self, carrier):
        with pytest.raises(MissingOriginalError):
            extract(carrier, KEY, NEGATE, (8, 8))

    def test_original_must_match_shape(self):
        image = GrayImage(pixels=np.zeros((16, 16), dtype=np.uint8))
        other = GrayImage(pixels=np.zeros((16, 8), dtype=np.uint8))
        with pytest.raises(DimensionMismatchError):
            extract(image, KEY, NEGATE, (8, 8), original=other)


class TestAuthenticate:
    def test_intact_image_is_authentic(self, carrier, logo):
        watermarked = embed(carrier, logo, AUTH_KEY, SUBSTITUTE)
        verdict = authenticate(watermarked, logo, KEY, SUBSTITUTE)
        assert verdict.authentic
        assert verdict.report.percentage == 100.0
        assert verdict.threshold == 95.0

    def test_tampered_image_is_signalled(self, carrier, logo):
        watermarked = embed(carrier, logo, AUTH_KEY, SUBSTITUTE)
        pixels = watermarked.pixels.copy()
        pixels[100:110, 100:110] = 0
        verdict = authenticate(GrayImage(pixels=pixels), logo, AUTH_KEY, SUBSTITUTE)
        assert not verdict.authentic

    def test_negate_mode_uses_flip_pattern(self):
        rng = np.random.default_rng(9)
        carrier = random_carrier(rng, 32)
        watermarked = embed(carrier, random_watermark(rng, 16), AUTH_KEY, NEGATE)
        verdict = authenticate(
            watermarked, None, AUTH_KEY, NEGATE, dims=(16, 16), original=carrier
        )
        assert verdict.authentic

    def test_substitute_needs_reference(self, carrier):
        with pytest.raises(PreconditionError, match="reference"):
            authenticate(carrier, None, AUTH_KEY, SUBSTITUTE)
