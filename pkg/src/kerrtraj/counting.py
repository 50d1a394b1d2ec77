"""Photon-counting quantum trajectories.

Fixed-step first-order jump scheme: at every step one uniform variate
decides between a detection event (probability ``<J_c^dag J_c> dt`` per
channel, at most one event per step) and deterministic evolution under the
non-Hermitian effective Hamiltonian ``H - (i/2) sum_c J_c^dag J_c``, with
renormalization after either branch.  The no-jump step is classic RK4,
which for a constant generator collapses to its degree-4 Taylor
polynomial, precomputed once.
"""

import numpy as np

from ._engine import BLOCK_STEPS, DT_COUNTING, initial_state, model_pieces, philox_gen, run_grid, split_jumps
from ._kernels import counting_block
from .errors import StepSizeError
from .master import _rk4_propagator
from .model import ModelParams
from .record import JumpEvent, TrajectoryRecord

__all__ = ["MAX_JUMP_PROBABILITY", "jump_probabilities", "effective_hamiltonian", "step_counting", "run_counting", "counting_states"]

# The scheme requires the per-step jump probability to stay small; exceeding
# this cap raises StepSizeError.
MAX_JUMP_PROBABILITY = 0.1


def effective_hamiltonian(H, jumps) -> np.ndarray:
    """Non-Hermitian generator H - (i/2) sum_c J_c^dag J_c of the no-jump evolution."""
    jops, _ = split_jumps(jumps)
    H_eff = np.asarray(H, dtype=complex).copy()
    for J in jops:
        H_eff -= 0.5j * (J.conj().T @ J)
    return H_eff


def jump_probabilities(psi, jumps, dt: float) -> np.ndarray:
    """Per-channel detection probabilities <J_c^dag J_c> dt for one step."""
    jops, _ = split_jumps(jumps)
    psi = np.asarray(psi, dtype=complex)
    return np.array([np.linalg.norm(J @ psi) ** 2 * dt for J in jops])


def _no_jump_propagator(H, jops, dt):
    H_eff = np.asarray(H, dtype=complex).copy()
    for J in jops:
        H_eff -= 0.5j * (J.conj().T @ J)
    return _rk4_propagator(-1j * H_eff, dt)


def step_counting(psi, H, jumps, dt, rng):
    """One stochastic step; returns (new state, JumpEvent or None).

    ``rng`` needs a ``random()`` method supplying the step's uniform
    variate (a numpy Generator works).  The event time is the end of the
    step, dt.
    """
    jops, labels = split_jumps(jumps)
    psi = np.ascontiguousarray(psi, dtype=complex)
    prop = _no_jump_propagator(H, jops, dt)
    u = np.array([float(rng.random())])
    out = psi.copy()
    samples = np.empty((0, psi.size), dtype=complex)
    ev_steps = np.empty(1, dtype=np.int64)
    ev_ch = np.empty(1, dtype=np.int64)
    _, n_ev, err, _ = counting_block(
        out, prop, jops, u, 0, dt, MAX_JUMP_PROBABILITY, np.empty(0, dtype=np.int64), 0, samples, ev_steps, ev_ch
    )
    if err == 2:
        raise StepSizeError(
            f"total jump probability exceeds {MAX_JUMP_PROBABILITY} in one step; reduce dt"
        )
    event = JumpEvent(time=dt, channel=labels[ev_ch[0]]) if n_ev else None
    return out, event


def counting_states(params, n_steps, dt, sample_steps, seed, traj_index=0, psi0=None):
    """Core driver: sampled states plus the raw event log (step, channel label).

    Deterministic function of (params, seed, traj_index): randomness comes
    from a Philox stream keyed by that pair, one uniform consumed per step.
    """
    H, jops, labels = model_pieces(params)
    if jops.shape[0] == 0:
        raise ValueError("no dissipation channel is active; counting needs at least one")
    prop = _no_jump_propagator(H, jops, dt)
    psi = initial_state(params, psi0)

    p0 = float(sum(np.linalg.norm(J @ psi) ** 2 for J in jops) * dt)
    if p0 > MAX_JUMP_PROBABILITY:
        raise StepSizeError(
            f"initial jump probability {p0:.3g} exceeds {MAX_JUMP_PROBABILITY}; reduce dt"
        )

    samples = np.empty((sample_steps.size, psi.size), dtype=complex)
    s_idx = 0
    if sample_steps.size and sample_steps[0] == 0:
        samples[0] = psi
        s_idx = 1
    gen = philox_gen(seed, traj_index)
    ev_all_steps, ev_all_ch = [], []
    k = 0
    while k < n_steps:
        nb = min(BLOCK_STEPS, n_steps - k)
        u = gen.random(nb)
        ev_steps = np.empty(nb, dtype=np.int64)
        ev_ch = np.empty(nb, dtype=np.int64)
        s_idx, n_ev, err, err_step = counting_block(
            psi, prop, jops, u, k, dt, MAX_JUMP_PROBABILITY, sample_steps, s_idx, samples, ev_steps, ev_ch
        )
        if err == 2:
            raise StepSizeError(
                f"total jump probability exceeded {MAX_JUMP_PROBABILITY} at t={err_step * dt:.4g}; reduce dt"
            )
        ev_all_steps.append(ev_steps[:n_ev].copy())
        ev_all_ch.append(ev_ch[:n_ev].copy())
        k += nb
    ev_steps = np.concatenate(ev_all_steps) if ev_all_steps else np.empty(0, dtype=np.int64)
    ev_ch = np.concatenate(ev_all_ch) if ev_all_ch else np.empty(0, dtype=np.int64)
    return samples, ev_steps, ev_ch, labels


def run_counting(params: ModelParams, t_final: float, dt: float = DT_COUNTING, sample_every: float = 0.1, seed: int = 0, psi0=None, traj_index: int = 0) -> TrajectoryRecord:
    """Simulate one photon-counting trajectory and sample its observables."""
    from ._engine import observables_from_states

    n_steps, sample_steps, sample_times = run_grid(t_final, dt, sample_every)
    states, ev_steps, ev_ch, labels = counting_states(
        params, n_steps, dt, sample_steps, seed, traj_index, psi0
    )
    x, p, parity, n = observables_from_states(states, params.n_max)
    events = [JumpEvent(time=float(s * dt), channel=labels[c]) for s, c in zip(ev_steps, ev_ch)]
    return TrajectoryRecord(
        protocol="counting",
        sample_times=sample_times,
        x=x,
        p=p,
        parity=parity,
        n=n,
        seed=seed,
        dt=dt,
        params=params,
        events=events,
    )
