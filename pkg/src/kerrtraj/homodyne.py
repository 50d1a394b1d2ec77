"""Ideal homodyne quantum trajectories (diffusive unraveling).

Both loss channels are monitored against infinitely strong real local
oscillators, so the conditional state obeys a diffusive stochastic
Schroedinger equation driven by one Wiener increment per channel:

    d|psi> = -i H |psi> dt
             + sum_c { [J_c - <J_c + J_c^dag>/2] dW_c
                       - 1/2 [J_c^dag J_c - <J_c+J_c^dag> J_c
                              + <J_c+J_c^dag>^2/4] dt } |psi>

integrated by Euler-Maruyama with renormalization after every step.  No
local-oscillator amplitude appears anywhere: only the ideal limit is
implemented.  The measured current of channel c satisfies
I_c(t) dt = <J_c + J_c^dag>(t) dt + dW_c(t).
"""

import numpy as np

from ._engine import BLOCK_STEPS, DT_HOMODYNE, initial_state, model_pieces, observables_from_states, philox_gen, run_grid, split_jumps
from ._kernels import homodyne_block
from .errors import IntegrationError
from .model import ModelParams
from .record import TrajectoryRecord

__all__ = ["WienerStream", "step_homodyne", "homodyne_currents", "run_homodyne", "homodyne_states"]


class WienerStream:
    """Per-channel Wiener increments from a counter-based stream.

    Increments are Gaussian with mean zero and variance dt, mutually
    independent across channels and steps; the stream is a pure function
    of (seed, trajectory index), independent of block size or sampling
    stride.
    """

    def __init__(self, seed: int, dt: float, n_channels: int, traj_index: int = 0):
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.seed = seed
        self.dt = dt
        self.n_channels = n_channels
        self._gen = philox_gen(seed, traj_index)

    def increments(self, n_steps: int) -> np.ndarray:
        """Next (n_steps, n_channels) block of increments."""
        return self._gen.standard_normal((n_steps, self.n_channels)) * np.sqrt(self.dt)


def _drift_matrix(H, jops, dt):
    A = -1j * np.asarray(H, dtype=complex)
    for J in jops:
        A = A - 0.5 * (J.conj().T @ J)
    return A * dt


def step_homodyne(psi, H, jumps, dt, dW):
    """One Euler-Maruyama step with externally supplied increments dW (one
    per channel); returns the renormalized state."""
    jops, _ = split_jumps(jumps)
    psi = np.ascontiguousarray(psi, dtype=complex)
    dW = np.asarray(dW, dtype=float).reshape(1, -1)
    if dW.shape[1] != jops.shape[0]:
        raise ValueError(f"got {dW.shape[1]} increments for {jops.shape[0]} channels")
    A_dt = _drift_matrix(H, jops, dt)
    out = psi.copy()
    _, err, _, _, _, _ = homodyne_block(
        out, A_dt, jops, dW, 0, dt,
        np.empty(0, dtype=np.int64), 0,
        np.empty((0, psi.size), dtype=complex),
        np.empty((0, jops.shape[0])),
        np.zeros(jops.shape[0]), 0, 0.0, 0.0,
    )
    if err:
        raise IntegrationError("state became non-finite in one step; reduce dt")
    return out


def homodyne_currents(m_series, dW, dt):
    """Measured currents I_c = <J_c + J_c^dag> + dW_c/dt for aligned series.

    ``m_series`` holds the per-step signal expectations (n_steps, n_ch),
    ``dW`` the matching Wiener increments.
    """
    m_series = np.asarray(m_series, dtype=float)
    dW = np.asarray(dW, dtype=float)
    if m_series.shape != dW.shape:
        raise ValueError(f"series shapes differ: {m_series.shape} vs {dW.shape}")
    return m_series + dW / dt


def homodyne_states(params, n_steps, dt, sample_steps, seed, traj_index=0, psi0=None):
    """Core driver: sampled states, bin-averaged currents, norm-drift stats."""
    H, jops, _ = model_pieces(params)
    A_dt = _drift_matrix(H, jops, dt)
    psi = initial_state(params, psi0)
    n_ch = jops.shape[0]

    samples = np.empty((sample_steps.size, psi.size), dtype=complex)
    cur_samples = np.zeros((sample_steps.size, n_ch))
    s_idx = 0
    if sample_steps.size and sample_steps[0] == 0:
        samples[0] = psi
        s_idx = 1
    stream = WienerStream(seed, dt, n_ch, traj_index)
    cur_acc = np.zeros(n_ch)
    drift_max = 0.0
    drift_sum = 0.0
    last_k = 0
    k = 0
    while k < n_steps:
        nb = min(BLOCK_STEPS, n_steps - k)
        dW = stream.increments(nb)
        s_idx, err, err_step, drift_max, drift_sum, last_k = homodyne_block(
            psi, A_dt, jops, dW, k, dt, sample_steps, s_idx, samples, cur_samples, cur_acc, last_k, drift_max, drift_sum
        )
        if err:
            raise IntegrationError(
                f"state became non-finite at t={err_step * dt:.4g}; reduce dt"
            )
        k += nb
    mean_drift = drift_sum / n_steps if n_steps else 0.0
    return samples, cur_samples, drift_max, mean_drift


def run_homodyne(params: ModelParams, t_final: float, dt: float = DT_HOMODYNE, sample_every: float = 0.1, seed: int = 0, psi0=None, traj_index: int = 0) -> TrajectoryRecord:
    """Simulate one homodyne trajectory; currents are bin averages over each
    sampling interval (zero at t = 0 where nothing has been integrated)."""
    n_steps, sample_steps, sample_times = run_grid(t_final, dt, sample_every)
    states, currents, drift_max, drift_mean = homodyne_states(
        params, n_steps, dt, sample_steps, seed, traj_index, psi0
    )
    x, p, parity, n = observables_from_states(states, params.n_max)
    return TrajectoryRecord(
        protocol="homodyne",
        sample_times=sample_times,
        x=x,
        p=p,
        parity=parity,
        n=n,
        seed=seed,
        dt=dt,
        params=params,
        currents=currents,
        max_norm_drift=drift_max,
        mean_norm_drift=drift_mean,
    )
