import numpy as np
import pytest

from src.core.exceptions import DataFormatError
from src.core.models import GrayImage, Watermark
from src.infrastructure.files.exceptions import (
    MalformedHeaderError,
    MalformedPayloadError,
    MaxvalUnsupportedError,
    TruncatedPayloadError,
)
from src.infrastructure.files.netpbm import (
    decode_pbm,
    decode_pgm,
    encode_pbm,
    encode_pgm,
    load_pbm,
    load_pgm,
    save_pbm,
    save_pgm,
)


@pytest.fixture
def image():
    rng = np.random.default_rng(21)
    return GrayImage(pixels=rng.integers(0, 256, size=(5, 7), dtype=np.uint8))


@pytest.fixture
def watermark():
    rng = np.random.default_rng(22)
    return Watermark(bits=rng.integers(0, 2, size=(3, 13)))


class TestPgm:
    def test_encode_writes_canonical_header(self):
        image = GrayImage(pixels=np.array([[0, 255]], dtype=np.uint8))
        assert encode_pgm(image) == b"P5\n2 1\n255\n\x00\xff"

    def test_decode_binary(self):
        decoded = decode_pgm(b"P5\n2 1\n255\n\x00\xff")
        assert decoded.pixels.tolist() == [[0, 255]]

    def test_decode_plain_with_comments(self):
        data = b"P2\n# made by hand\n2 2 # dims\n255\n0 1\n  2\n3\n"
        assert decode_pgm(data).pixels.tolist() == [[0, 1], [2, 3]]

    def test_decode_accepts_comment_inside_header(self):
        data = b"P5 # comment\n1\n1\n255\n\x2a"
        assert decode_pgm(data).pixels.tolist() == [[42]]

    def test_binary_and_plain_encodings_decode_alike(self, image):
        assert decode_pgm(encode_pgm(image)) == image
        assert decode_pgm(encode_pgm(image, plain=True)) == image

    def test_rejects_wrong_magic(self):
        with pytest.raises(MalformedHeaderError) as exc_info:
            decode_pgm(b"P6\n1 1\n255\n\x00\x00\x00")
        assert exc_info.value.offset == 0

    def test_rejects_16_bit_maxval(self):
        with pytest.raises(MaxvalUnsupportedError, match="65535") as exc_info:
            decode_pgm(b"P5\n1 1\n65535\n\x00\x00")
        assert exc_info.value.offset == 7

    def test_rejects_truncated_payload(self):
        data = b"P5\n2 2\n255\n\x00"
        with pytest.raises(TruncatedPayloadError, match="found 1") as exc_info:
            decode_pgm(data)
        assert exc_info.value.offset == len(data)

    def test_rejects_missing_dimension(self):
        with pytest.raises(MalformedHeaderError, match="expected height"):
            decode_pgm(b"P5\n2 x\n255\n")

    def test_rejects_zero_width(self):
        with pytest.raises(MalformedHeaderError, match="width must be positive"):
            decode_pgm(b"P5\n0 1\n255\n")

    def test_rejects_plain_sample_over_maxval(self):
        with pytest.raises(MalformedPayloadError, match="exceeds maxval"):
            decode_pgm(b"P2\n1 1\n255\n256\n")

    def test_rejects_garbage_in_plain_raster(self):
        with pytest.raises(MalformedPayloadError, match="expected sample"):
            decode_pgm(b"P2\n2 1\n255\n1 x\n")

    def test_errors_are_data_format_errors(self):
        with pytest.raises(DataFormatError, match="byte offset"):
            decode_pgm(b"")


class TestPbm:
    def test_p4_padding_is_dropped(self):
        # 10 bits per row: the low six bits of the second byte are padding
        data = b"P4\n10 1\n" + bytes([0b10101010, 0b10111111])
        decoded = decode_pbm(data)
        assert decoded.flat.astype(int).tolist() == [1, 0, 1, 0, 1, 0, 1, 0, 1, 0]

    def test_p4_padding_is_written_as_zero(self):
        mark = Watermark.from_flat([1] * 10, 10, 1)
        assert encode_pbm(mark) == b"P4\n10 1\n" + bytes([0xFF, 0b11000000])

    @pytest.mark.parametrize(
        "data", [b"P1\n3 2\n1 0 1\n0 1 0\n", b"P1\n3 2\n101010\n", b"P1 3 2 10 1010"]
    )
    def test_decode_plain_layouts(self, data):
        assert decode_pbm(data).bits.astype(int).tolist() == [[1, 0, 1], [0, 1, 0]]

    def test_plain_rows_wrap_at_70_columns(self):
        mark = Watermark.from_flat([1] * 100, 100, 1)
        lines = encode_pbm(mark, plain=True).decode("ascii").splitlines()
        assert lines[1:] == ["100 1", "1" * 70, "1" * 30]

    def test_binary_and_plain_encodings_decode_alike(self, watermark):
        assert decode_pbm(encode_pbm(watermark)) == watermark
        assert decode_pbm(encode_pbm(watermark, plain=True)) == watermark

    def test_rejects_bad_symbol(self):
        with pytest.raises(MalformedPayloadError) as exc_info:
            decode_pbm(b"P1\n2 1\n1 2\n")
        assert exc_info.value.offset == 9

    def test_rejects_truncated_p4(self):
        with pytest.raises(TruncatedPayloadError):
            decode_pbm(b"P4\n16 2\n\xff\xff")

    def test_rejects_pgm_magic(self):
        with pytest.raises(MalformedHeaderError, match="P4, P1"):
            decode_pbm(b"P5\n1 1\n255\n\x00")


def test_files_round_trip_through_disk(tmp_path, image, watermark):
    save_pgm(image, tmp_path / "a.pgm")
    save_pbm(watermark, tmp_path / "a.pbm", plain=True)
    assert (tmp_path / "a.pgm").read_bytes().startswith(b"P5\n7 5\n255\n")
    assert load_pgm(tmp_path / "a.pgm") == image
    assert load_pbm(tmp_path / "a.pbm") == watermark
