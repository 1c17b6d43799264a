"""Self-contained test corpus: a procedural carrier and a binary logo."""

from pathlib import Path
from typing import Final

import numpy as np

from src.core.models import GrayImage, Watermark
from src.core.splitmix import standard_normal
from src.infrastructure.files.netpbm import (
    PathLike,
    load_pbm,
    load_pgm,
    save_pbm,
    save_pgm,
)
from src.infrastructure.logging.logger import setup_logger

logger = setup_logger(__name__)

BUILTIN_CARRIER: Final[str] = "builtin:carrier"
BUILTIN_LOGO: Final[str] = "builtin:logo"
CARRIER_SIZE: Final[int] = 256
LOGO_SIZE: Final[int] = 64
GRAIN_SEED: Final[int] = 0x5EED
GRAIN_SIGMA: Final[float] = 6.0


def synthetic_carrier(size: int = CARRIER_SIZE) -> GrayImage:
    """Sinusoidal ridges under a radial falloff, plus seeded film grain."""
    if size < 1:
        raise ValueError("carrier size must be positive")
    y, x = np.mgrid[0:size, 0:size].astype(np.float64) / max(size - 1, 1)
    ridges = (
        0.5
        + 0.25 * np.sin(2.0 * np.pi * (3.0 * x + 2.0 * y))
        + 0.15 * np.cos(2.0 * np.pi * 5.0 * x * y)
    )
    radius = np.hypot(x - 0.5, y - 0.5) / np.hypot(0.5, 0.5)
    falloff = 1.0 - 0.6 * radius**2
    grain = standard_normal(GRAIN_SEED, size * size).reshape(size, size)
    values = 40.0 + 180.0 * ridges * falloff + GRAIN_SIGMA * grain
    return GrayImage(pixels=np.clip(np.rint(values), 0, 255).astype(np.uint8))


def synthetic_logo(size: int = LOGO_SIZE) -> Watermark:
    """Ring, cross and border; true cells are black as in PBM."""
    if size < 8:
        raise ValueError("logo size must be at least 8")
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    center = (size - 1) / 2.0
    radius = np.hypot(x - center, y - center) / (size / 2.0)
    ring = (radius >= 0.55) & (radius <= 0.75)
    bar = max(1, size // 16)
    cross = (np.abs(x - center) < bar) | (np.abs(y - center) < bar)
    cross &= radius < 0.55
    edge = max(1, size // 32)
    border = (
        (x < edge) | (y < edge) | (x >= size - edge) | (y >= size - edge)
    )
    return Watermark(bits=ring | cross | border)


def load_carrier(reference: PathLike) -> GrayImage:
    if str(reference) == BUILTIN_CARRIER:
        logger.debug("Using the built-in synthetic carrier")
        return synthetic_carrier()
    return load_pgm(reference)


def load_watermark(reference: PathLike) -> Watermark:
    if str(reference) == BUILTIN_LOGO:
        logger.debug("Using the built-in synthetic logo")
        return synthetic_logo()
    return load_pbm(reference)


def write_corpus(directory: PathLike) -> tuple[Path, Path]:
    """Write ``carrier.pgm`` and ``logo.pbm`` under ``directory``."""
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    carrier_path, logo_path = target / "carrier.pgm", target / "logo.pbm"
    save_pgm(synthetic_carrier(), carrier_path)
    save_pbm(synthetic_logo(), logo_path)
    logger.info(f"Corpus written to {target}")
    return carrier_path, logo_path
