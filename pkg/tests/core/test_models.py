import numpy as np
import pytest
from pydantic import ValidationError

from src.core.enums import AttackKind
from src.core.models import (
    AttackSpec,
    AuthenticationVerdict,
    GrayImage,
    SecretKey,
    SimilarityReport,
    StrategyStream,
    USequence,
    Watermark,
    format_parameter,
)


class TestSecretKey:
    def test_defaults(self):
        key = SecretKey(mu=3.99, u0=0.3183)
        assert key.burn_in == 100
        assert key.mix_iters is None
        assert key.authenticated is False

    @pytest.mark.parametrize("mu", [3.5, 3.57, 4.01])
    def test_rejects_non_chaotic_mu(self, mu):
        with pytest.raises(ValidationError):
            SecretKey(mu=mu, u0=0.3183)

    @pytest.mark.parametrize("u0", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_rejects_degenerate_seed(self, u0):
        with pytest.raises(ValidationError):
            SecretKey(mu=3.99, u0=u0)

    def test_repr_hides_seed(self):
        assert "0.3183" not in repr(SecretKey(mu=3.99, u0=0.3183))

    def test_resolved_mix_iters(self):
        assert SecretKey(mu=3.99, u0=0.3).resolved_mix_iters(4096) == 8192
        assert SecretKey(mu=3.99, u0=0.3, mix_iters=10).resolved_mix_iters(4096) == 10


def test_gray_image_rejects_out_of_range_values():
    with pytest.raises(ValidationError, match="0, 255"):
        GrayImage(pixels=[[0, 256]])


def test_gray_image_is_read_only():
    image = GrayImage(pixels=np.zeros((2, 2), dtype=np.uint8))
    with pytest.raises(ValueError):
        image.pixels[0, 0] = 1


def test_watermark_from_flat_is_row_major():
    mark = Watermark.from_flat([1, 0, 0, 1, 1, 0], 3, 2)
    assert mark.width == 3
    assert mark.height == 2
    assert mark.bits.tolist() == [[True, False, False], [True, True, False]]
    with pytest.raises(ValueError, match="cannot fill"):
        Watermark.from_flat([1, 0], 3, 2)


def test_strategy_and_u_sequence_ranges():
    with pytest.raises(ValidationError):
        StrategyStream(values=[0, 1], n=4)
    with pytest.raises(ValidationError):
        USequence(values=[4], m=4)
    assert len(USequence(values=[0, 3], m=4)) == 2


def test_verdict_threshold():
    report = SimilarityReport(matching_bits=95, total_bits=100)
    assert AuthenticationVerdict(report=report, threshold=95.0).authentic
    assert not AuthenticationVerdict(report=report, threshold=96.0).authentic


def test_attack_spec_validation_and_label():
    assert AttackSpec(kind=AttackKind.ZEROING, parameter=50).label == "zeroing_50"
    assert AttackSpec(kind=AttackKind.ROTATION, parameter=2.5).label == "rotation_2.5"
    with pytest.raises(ValidationError, match="whole number"):
        AttackSpec(kind=AttackKind.ZEROING, parameter=1.5)
    with pytest.raises(ValidationError, match="at least 1"):
        AttackSpec(kind=AttackKind.JPEG, parameter=0.5)


@pytest.mark.parametrize("value, text", [(10.0, "10"), (0.5, "0.5"), (3, "3")])
def test_format_parameter(value, text):
    assert format_parameter(value) == text
