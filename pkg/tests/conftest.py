import numpy as np
import pytest


def random_pair(rng, height, width, shift=2, levels=256):
    """Right view is the left view shifted by ``shift`` columns plus a little noise."""
    left = rng.integers(0, levels, (height, width)).astype(np.uint8)
    right = np.roll(left, -shift, axis=1)
    flip = rng.random((height, width)) < 0.1
    right = np.where(flip, rng.integers(0, levels, (height, width)), right).astype(np.uint8)
    return left, right


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
