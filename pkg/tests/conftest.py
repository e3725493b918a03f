import pytest

from lpflow import Dims
from lpflow.sampling import make_rng


@pytest.fixture
def rng():
    return make_rng(20260809)


@pytest.fixture
def dims():
    return Dims(2, 3)


@pytest.fixture
def dims22():
    return Dims(2, 2)
