import numpy as np
import pytest

from slspec.numerics import Grid
from slspec.potentials import Potential, make_potential


@pytest.fixture(scope="session")
def grid():
    return Grid(2049)


@pytest.fixture(scope="session")
def grid_fine():
    return Grid(4097)


@pytest.fixture(scope="session")
def grid_small():
    return Grid(513)


@pytest.fixture(scope="session")
def standard_potentials(grid):
    """Three smooth potentials used across the orthogonality/duality checks."""
    return [
        make_potential(grid, "poly:0,0,1"),             # x^2
        make_potential(grid, f"cos:{np.pi},2"),         # 2 cos(pi x)
        make_potential(grid, "bump:0.4,0.15,1.5"),      # asymmetric gaussian bump
    ]


@pytest.fixture(scope="session")
def zero_potential(grid):
    return Potential.zero(grid)
