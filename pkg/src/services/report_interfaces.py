from abc import ABC, abstractmethod
from typing import Sequence

from src.core.models import GrayImage, ReportRow, Watermark


class AbstractReportWriter(ABC):
    @abstractmethod
    def write(self, rows: Sequence[ReportRow]) -> None:
        raise NotImplementedError


class AbstractArtifactStore(ABC):
    @abstractmethod
    def save_image(self, name: str, image: GrayImage) -> None:
        raise NotImplementedError

    @abstractmethod
    def save_watermark(self, name: str, watermark: Watermark) -> None:
        raise NotImplementedError
