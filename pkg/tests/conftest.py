import numpy as np
import pytest

from kerrtraj.master import liouvillian_for, steady_state
from kerrtraj.model import ModelParams


@pytest.fixture(scope="session")
def two_photon_params():
    # headline working point: strong parametric drive, weak one-photon loss
    return ModelParams(U=1.0, G=5.0, F=0.0, gamma=0.1, eta=1.0, n_max=15)


@pytest.fixture(scope="session")
def one_photon_params():
    return ModelParams(U=1.0, G=0.0, F=5.0, gamma=0.1, eta=1.0, n_max=15)


@pytest.fixture(scope="session")
def rho_ss_two_photon(two_photon_params):
    return steady_state(liouvillian_for(two_photon_params, "two_photon"))


@pytest.fixture(scope="session")
def rho_ss_one_photon(one_photon_params):
    return steady_state(liouvillian_for(one_photon_params, "one_photon"))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240809)
