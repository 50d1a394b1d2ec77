import math

import numpy as np
import pytest

from kerrtraj.fock import is_hermitian, parity_op
from kerrtraj.model import ModelParams, hamiltonian, hamiltonian_one_photon, hamiltonian_two_photon, jump_operators


def test_two_photon_hamiltonian_matrix_elements(two_photon_params):
    H = hamiltonian_two_photon(two_photon_params)
    assert is_hermitian(H, 1e-12)
    # <2|H|0> = (G/2) sqrt(2): hand-evaluated action of the pair drive on vacuum
    assert H[2, 0] == pytest.approx(0.5 * two_photon_params.G * math.sqrt(2))
    # Kerr diagonal U n (n-1) / 2
    for n in range(two_photon_params.n_max + 1):
        assert H[n, n].real == pytest.approx(0.5 * two_photon_params.U * n * (n - 1))


def test_two_photon_hamiltonian_zero_case():
    params = ModelParams(U=0.0, G=0.0, gamma=0.1, n_max=8)
    assert np.all(hamiltonian_two_photon(params) == 0.0)


def test_two_photon_hamiltonian_parity_symmetric(two_photon_params):
    H = hamiltonian_two_photon(two_photon_params)
    P = parity_op(two_photon_params.n_max)
    assert np.max(np.abs(H @ P - P @ H)) < 1e-12


def test_one_photon_hamiltonian(one_photon_params):
    H = hamiltonian_one_photon(one_photon_params)
    assert is_hermitian(H, 1e-12)
    assert H[1, 0] == pytest.approx(one_photon_params.F)
    P = parity_op(one_photon_params.n_max)
    assert np.max(np.abs(H @ P - P @ H)) > 0.0  # odd drive breaks parity


def test_general_hamiltonian_reduces_to_specialized(two_photon_params, one_photon_params):
    assert np.array_equal(hamiltonian(two_photon_params), hamiltonian_two_photon(two_photon_params))
    assert np.array_equal(hamiltonian(one_photon_params), hamiltonian_one_photon(one_photon_params))


def test_jump_operators_channels(two_photon_params):
    ops = jump_operators(two_photon_params)
    labels = [label for _, label in ops]
    assert labels == ["1ph", "2ph"]
    # gamma = 0 drops the one-photon channel
    ops0 = jump_operators(ModelParams(U=1.0, G=5.0, gamma=0.0, eta=1.0, n_max=15))
    assert [label for _, label in ops0] == ["2ph"]


def test_one_photon_jump_norm(two_photon_params):
    (J1, _), (J2, _) = jump_operators(two_photon_params)
    n_max = two_photon_params.n_max
    # J1^dag J1 = gamma diag(0, 1, 2, ...)
    expected = two_photon_params.gamma * np.diag(np.arange(n_max + 1, dtype=float))
    assert np.max(np.abs(J1.conj().T @ J1 - expected)) < 1e-12
    # two-photon operator annihilates |1>
    one = np.zeros(n_max + 1, dtype=complex)
    one[1] = 1.0
    assert np.max(np.abs(J2 @ one)) == 0.0


def test_jump_parity_algebra(two_photon_params):
    (J1, _), (J2, _) = jump_operators(two_photon_params)
    P = parity_op(two_photon_params.n_max)
    assert np.max(np.abs(P @ J1 + J1 @ P)) < 1e-12
    assert np.max(np.abs(P @ J2 - J2 @ P)) < 1e-12


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(gamma=-0.1)
    with pytest.raises(ValueError):
        ModelParams(eta=-1.0)
    with pytest.raises(ValueError):
        ModelParams(n_max=0)
