import pytest

from patmt import fixture_path, load_fixture


@pytest.fixture(scope="session")
def figure1():
    return load_fixture("figure1")


@pytest.fixture(scope="session")
def ambiguity():
    return load_fixture("ambiguity")


@pytest.fixture(scope="session")
def tutorial():
    return load_fixture("tutorial")


@pytest.fixture
def data_path():
    return lambda name: str(fixture_path(name))
