import numpy as np
import pytest

BLOB_IMAGE_SIZE = 256
BLOB_ROWS = (96, 159)  # inclusive
BLOB_COLS = (96, 159)


@pytest.fixture(scope="session")
def blob_image():
    """Uniform dim background with one bright square block."""
    img = np.full((BLOB_IMAGE_SIZE, BLOB_IMAGE_SIZE, 3), 0.2)
    img[BLOB_ROWS[0] : BLOB_ROWS[1] + 1, BLOB_COLS[0] : BLOB_COLS[1] + 1] = 1.0
    return img


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
