"""Bit-exact PGM (P5/P2) and PBM (P4/P1) codecs.

Writers always emit canonical headers (``P5\\n<w> <h>\\n255\\n``); readers
accept any whitespace and ``#`` comments the netpbm formats allow.
"""

from pathlib import Path
from typing import Final, Union

import numpy as np

from src.core.models import GrayImage, Watermark
from src.infrastructure.files.exceptions import (
    MalformedHeaderError,
    MalformedPayloadError,
    MaxvalUnsupportedError,
    NetpbmError,
    TruncatedPayloadError,
)
from src.infrastructure.logging.logger import setup_logger

logger = setup_logger(__name__)

PathLike = Union[str, Path]

MAXVAL: Final[int] = 255
WHITESPACE: Final[bytes] = b" \t\n\r\v\f"
DIGITS: Final[bytes] = b"0123456789"
COMMENT: Final[int] = ord("#")
PBM_LINE_WIDTH: Final[int] = 70


class _Tokenizer:
    """Walks a netpbm byte buffer, skipping whitespace and comments."""

    def __init__(self, data: bytes, start: int = 2):
        self.data = data
        self.pos = start

    def skip_blank(self) -> None:
        data, size = self.data, len(self.data)
        while self.pos < size:
            byte = data[self.pos]
            if byte in WHITESPACE:
                self.pos += 1
            elif byte == COMMENT:
                while self.pos < size and data[self.pos] not in b"\r\n":
                    self.pos += 1
            else:
                break

    def at_end(self) -> bool:
        self.skip_blank()
        return self.pos >= len(self.data)

    def next_int(
        self, field: str, error: type[NetpbmError] = MalformedHeaderError
    ) -> tuple[int, int]:
        """Next decimal field and the offset it starts at."""
        self.skip_blank()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos] in DIGITS:
            self.pos += 1
        if start == self.pos:
            raise error(f"expected {field}", start)
        return int(self.data[start : self.pos]), start

    def payload_start(self) -> int:
        """Offset right after the single whitespace closing a binary header."""
        if self.pos >= len(self.data):
            raise TruncatedPayloadError("missing payload", self.pos)
        if self.data[self.pos] not in WHITESPACE:
            raise MalformedHeaderError("header must end with whitespace", self.pos)
        return self.pos + 1


def _magic(data: bytes, accepted: tuple[bytes, ...]) -> bytes:
    magic = data[:2]
    if magic not in accepted:
        raise MalformedHeaderError(
            f"magic number {magic!r} is not one of "
            + ", ".join(m.decode() for m in accepted),
            0,
        )
    return magic


def _dimensions(tokens: _Tokenizer) -> tuple[int, int]:
    width, width_at = tokens.next_int("width")
    if width < 1:
        raise MalformedHeaderError("width must be positive", width_at)
    height, height_at = tokens.next_int("height")
    if height < 1:
        raise MalformedHeaderError("height must be positive", height_at)
    return width, height


def decode_pgm(data: bytes) -> GrayImage:
    magic = _magic(data, (b"P5", b"P2"))
    tokens = _Tokenizer(data)
    width, height = _dimensions(tokens)
    maxval, maxval_at = tokens.next_int("maxval")
    if maxval != MAXVAL:
        raise MaxvalUnsupportedError(
            f"maxval {maxval} unsupported, only {MAXVAL}", maxval_at
        )
    count = width * height

    if magic == b"P5":
        start = tokens.payload_start()
        available = len(data) - start
        if available < count:
            raise TruncatedPayloadError(
                f"expected {count} payload bytes, found {available}", len(data)
            )
        payload = np.frombuffer(data, dtype=np.uint8, count=count, offset=start)
        return GrayImage(pixels=payload.reshape(height, width))

    values = np.empty(count, dtype=np.uint8)
    for i in range(count):
        if tokens.at_end():
            raise TruncatedPayloadError(
                f"expected {count} samples, found {i}", len(data)
            )
        value, value_at = tokens.next_int("sample", MalformedPayloadError)
        if value > MAXVAL:
            raise MalformedPayloadError(f"sample {value} exceeds maxval", value_at)
        values[i] = value
    return GrayImage(pixels=values.reshape(height, width))


def encode_pgm(image: GrayImage, plain: bool = False) -> bytes:
    if not plain:
        header = f"P5\n{image.width} {image.height}\n{MAXVAL}\n".encode("ascii")
        return header + image.pixels.tobytes()
    rows = (" ".join(str(int(v)) for v in row) for row in image.pixels)
    body = "\n".join(rows)
    return f"P2\n{image.width} {image.height}\n{MAXVAL}\n{body}\n".encode("ascii")


def decode_pbm(data: bytes) -> Watermark:
    magic = _magic(data, (b"P4", b"P1"))
    tokens = _Tokenizer(data)
    width, height = _dimensions(tokens)

    if magic == b"P4":
        start = tokens.payload_start()
        row_bytes = -(-width // 8)
        needed = row_bytes * height
        available = len(data) - start
        if available < needed:
            raise TruncatedPayloadError(
                f"expected {needed} payload bytes, found {available}", len(data)
            )
        packed = np.frombuffer(data, dtype=np.uint8, count=needed, offset=start)
        # padding bits at the end of each row are dropped
        bits = np.unpackbits(packed.reshape(height, row_bytes), axis=1)[:, :width]
        return Watermark(bits=bits)

    count = width * height
    bits = np.empty(count, dtype=np.bool_)
    for i in range(count):
        if tokens.at_end():
            raise TruncatedPayloadError(f"expected {count} bits, found {i}", len(data))
        symbol = data[tokens.pos]
        if symbol not in b"01":
            raise MalformedPayloadError(
                f"unexpected byte {bytes([symbol])!r} in P1 raster", tokens.pos
            )
        bits[i] = symbol == ord("1")
        tokens.pos += 1
    return Watermark(bits=bits.reshape(height, width))


def encode_pbm(watermark: Watermark, plain: bool = False) -> bytes:
    header = f"{watermark.width} {watermark.height}\n"
    if not plain:
        packed = np.packbits(watermark.bits.astype(np.uint8), axis=1)
        return b"P4\n" + header.encode("ascii") + packed.tobytes()
    lines: list[str] = []
    for row in watermark.bits:
        digits = "".join("1" if bit else "0" for bit in row)
        lines.extend(
            digits[i : i + PBM_LINE_WIDTH]
            for i in range(0, len(digits), PBM_LINE_WIDTH)
        )
    return ("P1\n" + header + "\n".join(lines) + "\n").encode("ascii")


def load_pgm(path: PathLike) -> GrayImage:
    image = decode_pgm(Path(path).read_bytes())
    logger.debug(f"Loaded {image.width}x{image.height} PGM from {path}")
    return image


def save_pgm(image: GrayImage, path: PathLike, plain: bool = False) -> None:
    Path(path).write_bytes(encode_pgm(image, plain=plain))
    logger.debug(f"Saved {image.width}x{image.height} PGM to {path}")


def load_pbm(path: PathLike) -> Watermark:
    watermark = decode_pbm(Path(path).read_bytes())
    logger.debug(f"Loaded {watermark.width}x{watermark.height} PBM from {path}")
    return watermark


def save_pbm(watermark: Watermark, path: PathLike, plain: bool = False) -> None:
    Path(path).write_bytes(encode_pbm(watermark, plain=plain))
    logger.debug(f"Saved {watermark.width}x{watermark.height} PBM to {path}")
