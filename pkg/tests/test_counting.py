import numpy as np
import pytest

from kerrtraj.counting import effective_hamiltonian, jump_probabilities, run_counting, step_counting
from kerrtraj.errors import StepSizeError
from kerrtraj.fock import cat_state, coherent_state, expval, fock_state, parity_op
from kerrtraj.model import ModelParams, hamiltonian_two_photon, jump_operators


class _FixedRng:
    def __init__(self, value):
        self.value = value

    def random(self):
        return self.value


def test_effective_hamiltonian_is_non_hermitian(two_photon_params):
    H = hamiltonian_two_photon(two_photon_params)
    H_eff = effective_hamiltonian(H, jump_operators(two_photon_params))
    anti = H_eff - H_eff.conj().T
    assert np.max(np.abs(anti)) > 0.01
    # anti-Hermitian part is -i sum J^dag J
    total = sum(J.conj().T @ J for J, _ in jump_operators(two_photon_params))
    assert np.max(np.abs(anti + 1j * total)) < 1e-12


def test_jump_probabilities_on_coherent_state(two_photon_params):
    # coherent-state moments: <a^dag a> = |alpha|^2, <a^dag^2 a^2> = |alpha|^4
    alpha, dt = 1.3, 1e-3
    psi = coherent_state(alpha, two_photon_params.n_max)
    p1, p2 = jump_probabilities(psi, jump_operators(two_photon_params), dt)
    assert p1 == pytest.approx(two_photon_params.gamma * alpha**2 * dt, rel=1e-5)
    assert p2 == pytest.approx(two_photon_params.eta * alpha**4 * dt, rel=1e-4)


def test_step_vacuum_is_dark(two_photon_params):
    params = ModelParams(U=1.0, G=0.0, F=0.0, gamma=0.1, eta=1.0, n_max=15)
    psi = fock_state(0, params.n_max)
    H = hamiltonian_two_photon(params)
    out, event = step_counting(psi, H, jump_operators(params), 1e-3, _FixedRng(0.0))
    assert event is None  # zero jump probability even at u = 0
    assert np.max(np.abs(out - psi)) < 1e-14


def test_jump_flips_cat_parity(two_photon_params):
    # forced one-photon detection on the even cat lands on the odd cat
    psi = cat_state(2.0, +1, two_photon_params.n_max)
    H = hamiltonian_two_photon(two_photon_params)
    out, event = step_counting(psi, H, jump_operators(two_photon_params), 1e-3, _FixedRng(0.0))
    assert event is not None and event.channel == "1ph"
    assert expval(out, parity_op(two_photon_params.n_max)).real == pytest.approx(-1.0, abs=1e-8)


def test_step_size_error(two_photon_params):
    psi = coherent_state(2.0, two_photon_params.n_max)
    H = hamiltonian_two_photon(two_photon_params)
    with pytest.raises(StepSizeError):
        step_counting(psi, H, jump_operators(two_photon_params), 0.5, _FixedRng(0.9))


def test_run_counting_gamma_zero_keeps_even_parity():
    params = ModelParams(U=1.0, G=5.0, F=0.0, gamma=0.0, eta=1.0, n_max=15)
    rec = run_counting(params, t_final=20.0, dt=1e-3, sample_every=0.1, seed=5)
    assert np.all(np.abs(rec.parity - 1.0) < 1e-8)
    assert all(ev.channel == "2ph" for ev in rec.events)


def test_run_counting_seed_determinism(two_photon_params):
    a = run_counting(two_photon_params, t_final=20.0, dt=1e-3, sample_every=0.1, seed=123)
    b = run_counting(two_photon_params, t_final=20.0, dt=1e-3, sample_every=0.1, seed=123)
    assert a.events == b.events
    assert np.array_equal(a.parity, b.parity)
    assert np.array_equal(a.n, b.n)
    c = run_counting(two_photon_params, t_final=20.0, dt=1e-3, sample_every=0.1, seed=124)
    assert c.events != a.events


def test_run_counting_norm_and_parity_exactness(two_photon_params):
    rec = run_counting(two_photon_params, t_final=50.0, dt=1e-3, sample_every=0.1, seed=7)
    # the generators are parity-pure, so |<parity>| stays exactly 1 and the
    # quadratures stay exactly 0 between and across jumps
    assert np.max(np.abs(np.abs(rec.parity) - 1.0)) < 1e-9
    assert np.max(np.abs(rec.x)) < 1e-12
    assert np.max(np.abs(rec.p)) < 1e-12


def test_one_photon_event_rate_matches_loss_law(two_photon_params):
    # long-run statistics: (# one-photon events)/t = gamma <n> within 5 SE
    rec = run_counting(two_photon_params, t_final=500.0, dt=1e-3, sample_every=0.1, seed=7)
    n1 = sum(1 for ev in rec.events if ev.channel == "1ph")
    expected = two_photon_params.gamma * np.mean(rec.n) * 500.0
    assert abs(n1 - expected) < 5 * np.sqrt(expected)


def test_sampling_stride_validation(two_photon_params):
    with pytest.raises(ValueError):
        run_counting(two_photon_params, t_final=1.0, dt=1e-3, sample_every=1e-4, seed=0)
    with pytest.raises(ValueError):
        run_counting(two_photon_params, t_final=-1.0, seed=0)
