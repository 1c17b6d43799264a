"""Deterministic attacks applied to watermarked images before extraction."""

import math
from typing import Callable, Final

import numpy as np

from src.core.dct import (
    BLOCK,
    Dct8x8Tables,
    blockwise_dct,
    blockwise_idct,
    quantize_blocks,
)
from src.core.enums import AttackKind, Interpolation, ZeroingAnchor
from src.core.models import AttackSpec, FloatArray, GrayImage
from src.core.splitmix import standard_normal
from src.infrastructure.logging.logger import setup_logger
from src.services.exceptions import AttackParameterError

logger = setup_logger(__name__)

LEVEL_SHIFT: Final[float] = 128.0


def _quantize(values: FloatArray) -> GrayImage:
    return GrayImage(pixels=np.clip(np.rint(values), 0, 255).astype(np.uint8))


def attack_zeroing(
    img: GrayImage, side: int, anchor: ZeroingAnchor = ZeroingAnchor.CENTER
) -> GrayImage:
    if not 1 <= side <= min(img.width, img.height):
        raise AttackParameterError(
            f"zeroing side {side} outside [1, {min(img.width, img.height)}]"
        )
    if anchor is ZeroingAnchor.CENTER:
        top, left = (img.height - side) // 2, (img.width - side) // 2
    else:
        top, left = 0, 0
    pixels = img.pixels.copy()
    pixels[top : top + side, left : left + side] = 0
    return GrayImage(pixels=pixels)


def _rotate(
    pixels: FloatArray, angle: float, interpolation: Interpolation
) -> FloatArray:
    """Rotate by ``angle`` degrees about the pixel center, by inverse mapping.

    Every output pixel samples the source at R(-angle) of its offset from
    the center; samples outside the raster are clamped to the border.
    """
    height, width = pixels.shape
    cy, cx = (height - 1) / 2.0, (width - 1) / 2.0
    theta = math.radians(angle)
    cos, sin = math.cos(theta), math.sin(theta)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    dx, dy = xx - cx, yy - cy
    src_x = np.clip(cos * dx + sin * dy + cx, 0.0, width - 1.0)
    src_y = np.clip(-sin * dx + cos * dy + cy, 0.0, height - 1.0)

    if interpolation is Interpolation.NEAREST:
        return pixels[
            np.rint(src_y).astype(np.intp), np.rint(src_x).astype(np.intp)
        ]

    x0 = np.floor(src_x).astype(np.intp)
    y0 = np.floor(src_y).astype(np.intp)
    x1 = np.minimum(x0 + 1, width - 1)
    y1 = np.minimum(y0 + 1, height - 1)
    fx, fy = src_x - x0, src_y - y0
    top = (1.0 - fx) * pixels[y0, x0] + fx * pixels[y0, x1]
    bottom = (1.0 - fx) * pixels[y1, x0] + fx * pixels[y1, x1]
    return (1.0 - fy) * top + fy * bottom


def attack_rotation(
    img: GrayImage,
    angle: float,
    interpolation: Interpolation = Interpolation.BILINEAR,
) -> GrayImage:
    """Rotate by ``angle`` then back by ``-angle``, quantizing in between."""
    if angle == 0:
        return img
    once = _quantize(_rotate(img.pixels.astype(np.float64), angle, interpolation))
    return _quantize(_rotate(once.pixels.astype(np.float64), -angle, interpolation))


def attack_jpeg(img: GrayImage, ratio: float) -> GrayImage:
    """Baseline JPEG round trip with the luminance table scaled by ``ratio``."""
    if ratio < 1.0:
        raise AttackParameterError(f"jpeg ratio must be at least 1, got {ratio}")
    pad_h = -img.height % BLOCK
    pad_w = -img.width % BLOCK
    plane = np.pad(
        img.pixels.astype(np.float64), ((0, pad_h), (0, pad_w)), mode="edge"
    )
    coefficients = blockwise_dct(plane - LEVEL_SHIFT)
    restored = blockwise_idct(
        quantize_blocks(coefficients, Dct8x8Tables(scale=ratio))
    )
    return _quantize((restored + LEVEL_SHIFT)[: img.height, : img.width])


def attack_gaussian(img: GrayImage, sigma: float, seed: int) -> GrayImage:
    if sigma <= 0:
        raise AttackParameterError(f"sigma must be positive, got {sigma}")
    noise = standard_normal(seed, img.pixel_count).reshape(img.height, img.width)
    return _quantize(img.pixels.astype(np.float64) + sigma * noise)


def _zeroing(img: GrayImage, spec: AttackSpec) -> GrayImage:
    return attack_zeroing(img, int(spec.parameter), spec.anchor)


def _rotation(img: GrayImage, spec: AttackSpec) -> GrayImage:
    return attack_rotation(img, spec.parameter, spec.interpolation)


def _jpeg(img: GrayImage, spec: AttackSpec) -> GrayImage:
    return attack_jpeg(img, spec.parameter)


def _gaussian(img: GrayImage, spec: AttackSpec) -> GrayImage:
    return attack_gaussian(img, spec.parameter, spec.seed)


ATTACKS: Final[dict[AttackKind, Callable[[GrayImage, AttackSpec], GrayImage]]] = {
    AttackKind.ZEROING: _zeroing,
    AttackKind.ROTATION: _rotation,
    AttackKind.JPEG: _jpeg,
    AttackKind.GAUSSIAN: _gaussian,
}


def apply_attack(img: GrayImage, spec: AttackSpec) -> GrayImage:
    attacked = ATTACKS[spec.kind](img, spec)
    logger.debug(f"Applied {spec.label} to {img.width}x{img.height} image")
    return attacked
