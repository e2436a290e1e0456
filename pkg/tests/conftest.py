import pytest

from tngames.io import load


@pytest.fixture(scope="session")
def ex1():
    return load("example1")


@pytest.fixture(scope="session")
def fig2():
    return load("fig2")
