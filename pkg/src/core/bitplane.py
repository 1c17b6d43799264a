"""Bit-plane decomposition of grayscale rasters into MSC and LSC streams.

Streams are laid out row-major over pixels and, inside a pixel, from the
most to the least significant selected bit.
"""

import numpy as np

from src.core.enums import StreamOrigin
from src.core.exceptions import LengthMismatchError
from src.core.models import BitPlaneLayout, BitStream, GrayImage, UInt8Array


def mask_columns(mask: int) -> list[int]:
    """Columns of ``np.unpackbits`` output selected by ``mask`` (column 0 = MSB)."""
    return [column for column in range(8) if mask & (0x80 >> column)]


def _unpack(image: GrayImage) -> UInt8Array:
    return np.unpackbits(image.pixels.reshape(-1, 1), axis=1)


def _extract(image: GrayImage, mask: int, origin: StreamOrigin) -> BitStream:
    planes = _unpack(image)[:, mask_columns(mask)]
    return BitStream(bits=planes.reshape(-1), origin=origin)


def extract_msc(image: GrayImage, layout: BitPlaneLayout) -> BitStream:
    return _extract(image, layout.msc_mask, StreamOrigin.MSC)


def extract_lsc(image: GrayImage, layout: BitPlaneLayout) -> BitStream:
    return _extract(image, layout.lsc_mask, StreamOrigin.LSC)


def lsc_capacity(image: GrayImage, layout: BitPlaneLayout) -> int:
    """Number M of least significant coefficients of ``image``."""
    return image.pixel_count * layout.lsc_width


def inject_lsc(
    image: GrayImage, layout: BitPlaneLayout, stream: BitStream
) -> GrayImage:
    """Return a copy of ``image`` whose LSC bits are replaced by ``stream``."""
    expected = lsc_capacity(image, layout)
    if len(stream) != expected:
        raise LengthMismatchError(
            f"LSC stream holds {len(stream)} bits, image needs {expected}"
        )
    planes = _unpack(image)
    planes[:, mask_columns(layout.lsc_mask)] = stream.bits.reshape(
        image.pixel_count, layout.lsc_width
    )
    pixels = np.packbits(planes, axis=1).reshape(image.height, image.width)
    return GrayImage(pixels=pixels)
