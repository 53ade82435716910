import numpy as np
import pytest

from iontomo import DeformationSpec, TrapConfig, solve_epsilon

VOGEL_03 = DeformationSpec("vogel_lamb_dicke", 0.3)


@pytest.fixture(scope="session")
def traj():
    """kappa = 0.5, Omega = 2 trajectory on [0, 10]."""
    return solve_epsilon(TrapConfig(0.5, 2.0), 10.0)


@pytest.fixture(scope="session")
def harmonic():
    return solve_epsilon(TrapConfig(0.0, 1.0), 20.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
