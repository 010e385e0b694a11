import pytest

from qlnet import netmodel
from qlnet.data import network_path


@pytest.fixture
def fig1():
    return netmodel.load(network_path("fig1"))


@pytest.fixture
def fig1_hadamard():
    return netmodel.load(network_path("fig1_hadamard"))


@pytest.fixture
def fig7_inset():
    return netmodel.load(network_path("fig7_inset"))
