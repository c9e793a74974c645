import pytest

from minetax import default_config


@pytest.fixture(scope="session")
def params():
    return default_config().analytical


@pytest.fixture(scope="session")
def model():
    return default_config().extended
