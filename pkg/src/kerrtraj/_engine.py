"""Shared plumbing for the two trajectory engines."""

import numpy as np

from .fock import fock_state, number_op, parity_op, quadratures
from .model import ModelParams, hamiltonian, jump_operators

BLOCK_STEPS = 200_000  # random numbers drawn per kernel invocation

# Default step sizes, in units of 1/eta.  The diffusive integrator uses a
# ten times smaller step because the noise terms degrade its weak order.
DT_COUNTING = 1e-3
DT_HOMODYNE = 1e-4


def philox_gen(seed: int, traj_index: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, trajectory index).

    The mapping from (step, channel) to random variate is fixed by the
    drawing order, so a given key reproduces the identical path regardless
    of sampling stride or how many blocks the run is split into.
    """
    if not 0 <= seed < 2**63:
        raise ValueError(f"seed must be in [0, 2^63), got {seed}")
    if not 0 <= traj_index < 2**63:
        raise ValueError(f"trajectory index must be in [0, 2^63), got {traj_index}")
    key = np.array([seed, traj_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def split_jumps(jumps):
    """Accept [(op, label), ...] or [op, ...]; return ((n_ch,D,D) array, labels)."""
    ops, labels = [], []
    for k, item in enumerate(jumps):
        if isinstance(item, tuple):
            op, label = item
        else:
            op, label = item, f"ch{k}"
        ops.append(np.asarray(op, dtype=complex))
        labels.append(label)
    if not ops:
        return np.zeros((0, 0, 0), dtype=complex), []
    d = ops[0].shape[0]
    for op in ops:
        if op.shape != (d, d):
            raise ValueError("jump operators must share one square shape")
    return np.ascontiguousarray(np.stack(ops)), labels


def model_pieces(params: ModelParams):
    """(H, jump array, labels) for the configured drives and rates."""
    H = hamiltonian(params)
    jops, labels = split_jumps(jump_operators(params))
    return H, jops, labels


def run_grid(t_final: float, dt: float, sample_every: float):
    """(n_steps, sorted sample step indices incl. 0, sample times)."""
    if t_final <= 0 or dt <= 0:
        raise ValueError("t_final and dt must be positive")
    stride = int(round(sample_every / dt))
    if stride < 1:
        raise ValueError(f"sample_every={sample_every!r} is below one step dt={dt!r}")
    n_steps = int(round(t_final / dt))
    if n_steps < 1:
        raise ValueError("t_final shorter than one step")
    sample_steps = np.arange(0, n_steps + 1, stride, dtype=np.int64)
    return n_steps, sample_steps, sample_steps * dt


def steps_for_times(t_grid, dt: float, n_steps: int):
    """Snap requested times to step indices (sorted, unique, within range)."""
    steps = np.unique(np.round(np.asarray(t_grid, dtype=float) / dt).astype(np.int64))
    if steps.size == 0:
        raise ValueError("empty time grid")
    if steps[0] < 0 or steps[-1] > n_steps:
        raise ValueError("time grid extends outside the run")
    return steps


def initial_state(params: ModelParams, psi0=None) -> np.ndarray:
    if psi0 is None:
        return fock_state(0, params.n_max)  # vacuum, the default initial condition
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (params.dim,):
        raise ValueError(f"psi0 shape {psi0.shape} does not match dimension {params.dim}")
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError("psi0 must be unit norm")
    return psi0.copy()


def observables_from_states(states: np.ndarray, n_max: int):
    """x, p, parity, n series for an array of sampled state vectors."""
    x_op, p_op = quadratures(n_max)
    probs = np.abs(states) ** 2
    n_diag = np.real(np.diag(number_op(n_max)))
    par_diag = np.real(np.diag(parity_op(n_max)))
    x = np.einsum("sd,de,se->s", states.conj(), x_op, states).real
    p = np.einsum("sd,de,se->s", states.conj(), p_op, states).real
    n = probs @ n_diag
    parity = probs @ par_diag
    return x, p, parity, n
