from functools import cache

import pytest

from rankmra import build_basis


@cache
def _basis(n: int):
    return build_basis(n)


@pytest.fixture
def basis_for():
    """Session-cached wavelet bases keyed by universe size."""
    return _basis
