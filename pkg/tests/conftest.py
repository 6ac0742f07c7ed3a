import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tfaloc import grid as g  # noqa: E402
from tfaloc.grid import GridSpec  # noqa: E402
from tfaloc.locop import default_symbols, default_windows  # noqa: E402


@pytest.fixture(scope="session")
def grid():
    return GridSpec(1, 256, 1 / 16)


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(1, 64)


@pytest.fixture(scope="session")
def phi(grid):
    return g.gaussian(grid)


@pytest.fixture(scope="session")
def psi(grid):
    return default_windows(grid)["phi,psi"][1]


@pytest.fixture(scope="session")
def symbols(grid):
    return default_symbols(grid)


@pytest.fixture(scope="session")
def mesh(grid):
    x, xi = grid.coords(2)
    return x, xi


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
