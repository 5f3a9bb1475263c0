"""Shared fixtures for the test suite."""

import numpy as np
import pytest
from scipy.integrate import quad

from pxbiharm.energy import ProblemInstance
from pxbiharm.exponents import constant_exponent
from pxbiharm.grids import Domain, build_grid
from pxbiharm.potentials import builtin_nonlinearity, make_power_family


@pytest.fixture(scope="session")
def interval_grid():
    return build_grid(Domain("interval"), 65)


@pytest.fixture(scope="session")
def ball_grid():
    return build_grid(Domain("ball_radial", N=2, R=1.0), 65)


@pytest.fixture(scope="session")
def rect_grid():
    return build_grid(Domain("rectangle", a=1.0, b=1.0), 17)


def make_instance(grid, p_value=2.0, lam=1.0, nl_name="const:1", q_value=1.5):
    p = constant_exponent(grid, p_value)
    spec = make_power_family(1.0, p)
    q = constant_exponent(grid, q_value)
    nl = builtin_nonlinearity(nl_name, grid, q)
    return ProblemInstance(grid, p, spec, nl, lam)


@pytest.fixture
def beam_instance(interval_grid):
    # (u'')'' = lambda * 1 on (0,1), Navier conditions
    return make_instance(interval_grid)


def spike_g(t, eps=0.05, M=40.0, sigma=0.05):
    """Right-hand side with a sharp Gaussian ridge at |t| = 1; gives a
    nonempty certificate interval on the unit interval."""
    t = np.asarray(t, float)
    return eps + M * np.exp(-(((np.abs(t) - 1.0) / sigma) ** 2))


spike_G = np.vectorize(
    lambda t: np.sign(t) * quad(spike_g, 0.0, abs(t), limit=200)[0]
)


def spike_instance(grid, lam=1.0):
    p = constant_exponent(grid, 2.0)
    spec = make_power_family(1.0, p)
    q = constant_exponent(grid, 1.5)
    nl = builtin_nonlinearity("separable", grid, q, alpha=1.0,
                              g=spike_g, G=spike_G)
    return ProblemInstance(grid, p, spec, nl, lam)
