from pathlib import Path

from src.core.models import GrayImage, Watermark
from src.infrastructure.files.netpbm import PathLike, save_pbm, save_pgm
from src.services.report_interfaces import AbstractArtifactStore


class NetpbmArtifactStore(AbstractArtifactStore):
    """Keeps evaluation images as ``<name>.pgm`` and marks as ``<name>.pbm``."""

    def __init__(self, directory: PathLike):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def save_image(self, name: str, image: GrayImage) -> None:
        save_pgm(image, self.directory / f"{name}.pgm")

    def save_watermark(self, name: str, watermark: Watermark) -> None:
        save_pbm(watermark, self.directory / f"{name}.pbm")
