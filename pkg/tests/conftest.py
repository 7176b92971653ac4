import pytest

from artifact.algebra import preset


@pytest.fixture
def toy():
    return preset("toy")


@pytest.fixture
def k3():
    return preset("K3-truncation")
