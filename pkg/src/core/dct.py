"""8x8 type-II DCT kernel and the JPEG luminance quantizer."""

from typing import Any, Final

import numpy as np
from pydantic import Field, field_validator

from src.core.models import ArrayModel, FloatArray

BLOCK: Final[int] = 8

# Luminance table of Annex K of the JPEG standard.
STD_LUMINANCE_QUANT: Final = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)


def dct_matrix(size: int = BLOCK) -> FloatArray:
    """Orthonormal DCT-II basis; row k holds frequency k."""
    k = np.arange(size, dtype=np.float64)[:, None]
    x = np.arange(size, dtype=np.float64)[None, :]
    basis = np.sqrt(2.0 / size) * np.cos(np.pi * (2.0 * x + 1.0) * k / (2.0 * size))
    basis[0, :] = np.sqrt(1.0 / size)
    return basis


DCT_BASIS: Final = dct_matrix()


class Dct8x8Tables(ArrayModel):
    base: FloatArray = Field(default_factory=lambda: STD_LUMINANCE_QUANT.copy())
    scale: float = Field(default=1.0, gt=0.0)

    @field_validator("base", mode="before")
    @classmethod
    def validate_base(cls, v: Any) -> FloatArray:
        array = np.asarray(v, dtype=np.float64)
        if array.shape != (BLOCK, BLOCK) or array.min() <= 0:
            raise ValueError("quantization base must be 8x8 and positive")
        return array

    @property
    def quantizers(self) -> FloatArray:
        return np.maximum(self.base * self.scale, 1.0)


def dct2(block: FloatArray) -> FloatArray:
    return DCT_BASIS @ block @ DCT_BASIS.T


def idct2(coefficients: FloatArray) -> FloatArray:
    return DCT_BASIS.T @ coefficients @ DCT_BASIS


def _as_blocks(plane: FloatArray) -> FloatArray:
    height, width = plane.shape
    if height % BLOCK or width % BLOCK:
        raise ValueError("plane dimensions must be multiples of 8")
    return plane.reshape(height // BLOCK, BLOCK, width // BLOCK, BLOCK)


def blockwise_dct(plane: FloatArray) -> FloatArray:
    blocks = _as_blocks(plane)
    out = np.einsum("ui,aibj,vj->aubv", DCT_BASIS, blocks, DCT_BASIS)
    return out.reshape(plane.shape)


def blockwise_idct(coefficients: FloatArray) -> FloatArray:
    blocks = _as_blocks(coefficients)
    out = np.einsum("ui,aubv,vj->aibj", DCT_BASIS, blocks, DCT_BASIS)
    return out.reshape(coefficients.shape)


def quantize_blocks(coefficients: FloatArray, tables: Dct8x8Tables) -> FloatArray:
    """Quantize then dequantize every 8x8 block with ``tables``."""
    blocks = _as_blocks(coefficients)
    step = tables.quantizers[None, :, None, :]
    return (np.round(blocks / step) * step).reshape(coefficients.shape)
