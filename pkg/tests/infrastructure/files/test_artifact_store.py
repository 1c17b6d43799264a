import numpy as np

from src.core.models import GrayImage, Watermark
from src.infrastructure.files.artifact_store import NetpbmArtifactStore
from src.infrastructure.files.netpbm import load_pbm, load_pgm


def test_store_creates_directory_and_writes_netpbm(tmp_path):
    store = NetpbmArtifactStore(tmp_path / "artifacts" / "nested")
    image = GrayImage(pixels=np.arange(12, dtype=np.uint8).reshape(3, 4))
    mark = Watermark(bits=np.eye(3, dtype=bool))

    store.save_image("jpeg_2_authenticated", image)
    store.save_watermark("jpeg_2_authenticated", mark)

    directory = tmp_path / "artifacts" / "nested"
    assert load_pgm(directory / "jpeg_2_authenticated.pgm") == image
    assert load_pbm(directory / "jpeg_2_authenticated.pbm") == mark
