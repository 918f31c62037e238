import pytest

from erwd.model import ModelParams


@pytest.fixture
def base():
    return ModelParams(0.5, 0.3, 0.2)


@pytest.fixture
def critical():
    return ModelParams(0.6, 0.1, 0.3)


@pytest.fixture
def superdiffusive():
    return ModelParams(0.8, 0.05, 0.15)
