import numpy as np
import pytest

from phfluid import Grid

TWO_PI = 2.0 * np.pi


def make_grid(n=32, periodic=(True, True), extents=(TWO_PI, TWO_PI), metric=(1.0, 1.0)):
    return Grid(extents=extents, resolution=(n, n), periodic=periodic, metric=metric)


@pytest.fixture
def periodic_grid():
    return make_grid(32)


@pytest.fixture
def bounded_grid():
    return make_grid(32, periodic=(False, False))


@pytest.fixture
def channel_grid():
    return make_grid(32, periodic=(False, True))


@pytest.fixture
def rng():
    return np.random.default_rng(515)
