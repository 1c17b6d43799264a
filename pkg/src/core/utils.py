import math
from typing import Final

import numpy as np

from src.core.exceptions import DimensionMismatchError
from src.core.models import GrayImage, SimilarityReport, Watermark

PEAK_INTENSITY: Final[float] = 255.0


def similarity(a: Watermark, b: Watermark) -> SimilarityReport:
    """Count the bits on which two watermarks agree."""
    if a.bits.shape != b.bits.shape:
        raise DimensionMismatchError(
            f"cannot compare a {a.width}x{a.height} watermark "
            f"with a {b.width}x{b.height} one"
        )
    matching = int(np.count_nonzero(a.bits == b.bits))
    return SimilarityReport(matching_bits=matching, total_bits=a.size)


def mean_squared_error(a: GrayImage, b: GrayImage) -> float:
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatchError(
            f"cannot compare a {a.width}x{a.height} image "
            f"with a {b.width}x{b.height} one"
        )
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr(a: GrayImage, b: GrayImage) -> float:
    """Peak signal-to-noise ratio in dB; ``math.inf`` for identical images."""
    mse = mean_squared_error(a, b)
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(PEAK_INTENSITY**2 / mse)
