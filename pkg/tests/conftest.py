import numpy as np
import pytest

from itx import _fallback


def rel(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return np.max(np.abs(a - b) / np.maximum(np.abs(a) + np.abs(b), 1e-300))


@pytest.fixture
def fallback():
    return _fallback


@pytest.fixture
def core():
    return pytest.importorskip("itx._core")
