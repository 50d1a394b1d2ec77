import numpy as np
import pytest

from kerrtraj.homodyne import WienerStream, homodyne_currents, homodyne_states, run_homodyne, step_homodyne
from kerrtraj.fock import coherent_state, fock_state
from kerrtraj.model import ModelParams, jump_operators


def test_wiener_stream_statistics():
    dt = 1e-3
    stream = WienerStream(seed=42, dt=dt, n_channels=2)
    dW = stream.increments(200_000)
    n = dW.shape[0]
    se_mean = np.sqrt(dt / n)
    for c in range(2):
        assert abs(dW[:, c].mean()) < 5 * se_mean
        assert abs(dW[:, c].var() - dt) < 5 * dt * np.sqrt(2.0 / n)
    # channels uncorrelated
    corr = np.mean(dW[:, 0] * dW[:, 1]) / dt
    assert abs(corr) < 5 / np.sqrt(n)


def test_wiener_stream_reproducible_and_keyed():
    s1 = WienerStream(seed=9, dt=1e-4, n_channels=2).increments(100)
    s2 = WienerStream(seed=9, dt=1e-4, n_channels=2).increments(100)
    s3 = WienerStream(seed=9, dt=1e-4, n_channels=2, traj_index=1).increments(100)
    assert np.array_equal(s1, s2)
    assert not np.array_equal(s1, s3)


def test_step_identity_with_no_channels():
    psi = coherent_state(1.0, 10)
    out = step_homodyne(psi, np.zeros((11, 11), dtype=complex), [], 1e-4, np.zeros(0))
    assert np.max(np.abs(out - psi)) < 1e-14


def test_step_vacuum_fixed_point(two_photon_params):
    # every term of the update annihilates the vacuum when dW = 0
    params = ModelParams(U=1.0, G=0.0, F=0.0, gamma=0.1, eta=1.0, n_max=15)
    psi = fock_state(0, params.n_max)
    out = step_homodyne(psi, np.zeros((16, 16), dtype=complex), jump_operators(params), 1e-4, np.zeros(2))
    assert np.max(np.abs(out - psi)) < 1e-14


def test_single_step_norm_drift_bound(two_photon_params):
    # one Euler-Maruyama step from a unit-norm state changes the norm only
    # at O(dt) before renormalization
    dt = 1e-4
    psi0 = coherent_state(1.0, two_photon_params.n_max)
    _, _, drift_max, _ = homodyne_states(
        two_photon_params, n_steps=1, dt=dt, sample_steps=np.array([1], dtype=np.int64), seed=3, psi0=psi0
    )
    assert 0 < drift_max < 10 * dt


def test_norm_drift_scales_linearly_in_dt(two_photon_params):
    # first-order check: halving dt halves the mean pre-renormalization drift
    drifts = {}
    for dt in (2e-4, 1e-4):
        n_steps = int(round(20.0 / dt))
        _, _, _, mean_drift = homodyne_states(
            two_photon_params, n_steps=n_steps, dt=dt,
            sample_steps=np.array([n_steps], dtype=np.int64), seed=11,
        )
        drifts[dt] = mean_drift
    ratio = drifts[1e-4] / drifts[2e-4]
    assert 0.4 < ratio < 0.62


def test_homodyne_currents_pure_function():
    rng = np.random.default_rng(1)
    m = np.zeros((50_000, 1))
    dt = 1e-4
    dW = rng.normal(0.0, np.sqrt(dt), size=(50_000, 1))
    cur = homodyne_currents(m, dW, dt)
    # vacuum signal: pure noise, zero mean within 5 SE
    T = 50_000 * dt
    assert abs(cur.mean()) < 5 / np.sqrt(T)
    # degenerate stream: current equals the signal exactly
    m2 = np.full((10, 2), 1.7)
    assert np.array_equal(homodyne_currents(m2, np.zeros((10, 2)), dt), m2)
    with pytest.raises(ValueError):
        homodyne_currents(np.zeros((5, 2)), np.zeros((4, 2)), dt)


def test_pinned_coherent_current_mean(two_photon_params):
    # state pinned at a real coherent alpha: channel-1 current averages to
    # 2 sqrt(gamma) alpha within 5 SE
    alpha, dt, n = 1.5, 1e-4, 200_000
    gamma = two_photon_params.gamma
    m = np.full((n, 1), 2.0 * np.sqrt(gamma) * alpha)
    dW = WienerStream(seed=8, dt=dt, n_channels=1).increments(n)
    cur = homodyne_currents(m, dW, dt)
    se = 1.0 / np.sqrt(n * dt)
    assert abs(cur.mean() - 2.0 * np.sqrt(gamma) * alpha) < 5 * se


def test_run_homodyne_determinism_and_record(two_photon_params):
    a = run_homodyne(two_photon_params, t_final=5.0, dt=1e-4, sample_every=0.1, seed=21)
    b = run_homodyne(two_photon_params, t_final=5.0, dt=1e-4, sample_every=0.1, seed=21)
    assert np.array_equal(a.x, b.x)
    assert np.array_equal(a.currents, b.currents)
    assert a.max_norm_drift == b.max_norm_drift
    assert a.currents.shape == (len(a.sample_times), 2)
    assert np.all(a.currents[0] == 0.0)  # nothing integrated at t = 0
    assert np.max(np.abs(a.parity)) <= 1 + 1e-9


def test_dt_convergence_of_stationary_statistics(two_photon_params):
    # stationary means of <x>^2 and <parity> at dt and dt/2 agree within the
    # combined between-trajectory statistical error
    def stationary_stats(dt):
        x2_means, p_means = [], []
        for k in range(4):
            rec = run_homodyne(two_photon_params, t_final=50.0, dt=dt, sample_every=0.1, seed=33, traj_index=k)
            stat = rec.sample_times > 20.0
            x2_means.append(np.mean(rec.x[stat] ** 2))
            p_means.append(np.mean(rec.parity[stat]))
        return np.array(x2_means), np.array(p_means)

    x2_a, p_a = stationary_stats(1e-4)
    x2_b, p_b = stationary_stats(5e-5)
    for a, b in ((x2_a, x2_b), (p_a, p_b)):
        se = np.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
        assert abs(a.mean() - b.mean()) <= 5 * se + 1e-4


def test_recorded_current_contains_signal(two_photon_params):
    # after settling onto one branch, the channel-1 bin-averaged current
    # tracks the signal <J1 + J1^dag> = 2 sqrt(gamma) <x> up to Wiener noise
    rec = run_homodyne(two_photon_params, t_final=60.0, dt=1e-4, sample_every=0.1, seed=2)
    sel = rec.sample_times > 20.0
    signal = 2.0 * np.sqrt(two_photon_params.gamma) * rec.x[sel]
    resid = rec.currents[sel, 0] - signal
    T = rec.sample_times[-1] - 20.0
    assert abs(resid.mean()) < 5 / np.sqrt(T)
