"""Lindblad master equation: superoperator build, propagation, steady state.

The generator is stored in the standard convention

    d rho / dt = -i [H, rho] + sum_k ( J_k rho J_k^dag - {J_k^dag J_k, rho}/2 )

acting on column-stacked density matrices (Fortran-order vec).  At the
dimensions used here (D <= ~64, so D^2 <= ~4096) dense linear algebra is
entirely adequate.
"""

from typing import NamedTuple

import numpy as np

from .errors import IntegrationError, MultipleSteadyStatesError
from .fock import annihilation, cat_state, parity_op
from .model import ModelParams, hamiltonian_one_photon, hamiltonian_two_photon, jump_operators

__all__ = [
    "vec",
    "unvec",
    "build_liouvillian",
    "liouvillian_for",
    "evolve_me",
    "steady_state",
    "TwoComponentFit",
    "fit_two_component",
    "uhlmann_fidelity",
]

# Null-space detection threshold on singular values of the Liouvillian.
NULL_SPACE_TOL = 1e-10


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix (Fortran order)."""
    return np.asarray(rho).flatten(order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"vector of length {v.size} is not a stacked square matrix")
    return v.reshape((d, d), order="F")


def build_liouvillian(H: np.ndarray, jumps) -> np.ndarray:
    """Dense D^2 x D^2 generator of the Lindblad equation (standard convention).

    With column stacking, vec(A rho B) = (B^T kron A) vec(rho), so

        L = -i (I kron H - H^T kron I)
            + sum_k [ conj(J_k) kron J_k
                      - (I kron J_k^dag J_k + (J_k^dag J_k)^T kron I) / 2 ]
    """
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    if H.shape != (d, d):
        raise ValueError(f"H must be square, got {H.shape}")
    eye = np.eye(d, dtype=complex)
    L = -1j * (np.kron(eye, H) - np.kron(H.T, eye))
    for J in jumps:
        J = np.asarray(J, dtype=complex)
        if J.shape != (d, d):
            raise ValueError(f"jump operator shape {J.shape} does not match H {H.shape}")
        JdJ = J.conj().T @ J
        L += np.kron(J.conj(), J) - 0.5 * (np.kron(eye, JdJ) + np.kron(JdJ.T, eye))
    return L


def liouvillian_for(params: ModelParams, drive: str = "two_photon") -> np.ndarray:
    """Convenience builder from model parameters; drive is "two_photon" or "one_photon"."""
    if drive == "two_photon":
        H = hamiltonian_two_photon(params)
    elif drive == "one_photon":
        H = hamiltonian_one_photon(params)
    else:
        raise ValueError(f"unknown drive {drive!r}")
    return build_liouvillian(H, [J for J, _ in jump_operators(params)])


def _rk4_propagator(L: np.ndarray, dt: float) -> np.ndarray:
    # One classic RK4 step of x' = L x with constant L is exactly the
    # degree-4 Taylor polynomial of expm(L dt); precompute it once.
    A = L * dt
    P = np.eye(L.shape[0], dtype=complex)
    term = np.eye(L.shape[0], dtype=complex)
    for k in range(1, 5):
        term = term @ A / k
        P = P + term
    return P


def evolve_me(rho0, L, t_final, dt=1e-3, sample_every=None):
    """Propagate rho by fixed-step RK4; return (times, rhos).

    Snapshots are taken every ``sample_every`` time units (default: 100*dt)
    and validated: trace drift above 1e-8 per unit time, or an eigenvalue
    below -1e-8, raises :class:`IntegrationError`.  Eigenvalues in
    (-1e-8, 0) are clamped to zero and the snapshot renormalized.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]
    if L.shape != (d * d, d * d):
        raise ValueError(f"Liouvillian shape {L.shape} does not match rho {rho0.shape}")
    if dt <= 0 or t_final <= 0:
        raise ValueError("dt and t_final must be positive")
    if sample_every is None:
        sample_every = 100 * dt
    stride = max(1, int(round(sample_every / dt)))
    n_steps = int(round(t_final / dt))

    prop = _rk4_propagator(L, dt)
    x = vec(rho0)
    times = [0.0]
    rhos = [_validated_snapshot(rho0, 0.0)]
    for k in range(1, n_steps + 1):
        x = prop @ x
        if k % stride == 0 or k == n_steps:
            t = k * dt
            times.append(t)
            rhos.append(_validated_snapshot(unvec(x), t))
    return np.array(times), np.array(rhos)


def _validated_snapshot(rho, t):
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-8 * max(t, 1.0):
        raise IntegrationError(
            f"trace drift {abs(tr - 1.0):.3e} at t={t:g} exceeds 1e-8 per unit time; reduce dt"
        )
    herm = 0.5 * (rho + rho.conj().T)
    evals, evecs = np.linalg.eigh(herm)
    if evals[0] < -1e-8:
        raise IntegrationError(
            f"density matrix eigenvalue {evals[0]:.3e} at t={t:g} below -1e-8; reduce dt"
        )
    if evals[0] < 0.0:
        evals = np.clip(evals, 0.0, None)
        herm = (evecs * evals) @ evecs.conj().T
        herm /= np.trace(herm).real
    return herm


def steady_state(L: np.ndarray) -> np.ndarray:
    """Null vector of L, reshaped and normalized to a density matrix.

    Uses a full SVD; raises :class:`MultipleSteadyStatesError` when more
    than one singular value lies below the null-space threshold (this is
    the gamma = 0 case, where parity sectors decouple).
    """
    L = np.asarray(L)
    _, s, vh = np.linalg.svd(L)
    null_dim = int(np.sum(s < NULL_SPACE_TOL))
    if null_dim > 1:
        raise MultipleSteadyStatesError(
            f"Liouvillian null space has dimension {null_dim}; steady state not unique"
        )
    rho = unvec(vh[-1].conj())
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    residual = np.linalg.norm(L @ vec(rho))
    if residual > NULL_SPACE_TOL:
        raise IntegrationError(f"steady-state residual {residual:.3e} exceeds {NULL_SPACE_TOL:.0e}")
    return rho


class TwoComponentFit(NamedTuple):
    p_plus: float
    p_minus: float
    alpha: complex
    fidelity: float


def fit_two_component(rho_ss: np.ndarray):
    """Decompose a bimodal steady state into a two-cat mixture.

    Returns a :class:`TwoComponentFit` with the weights of the even/odd
    components, the amplitude alpha = sqrt(Tr[rho a^2]) (principal root;
    exact for both the cat and the coherent mixture), and the Uhlmann
    fidelity between rho_ss and the reconstructed mixture.

    Returns ``None`` when the two dominant eigenvectors are not parity
    polarized (|<parity>| < 0.9), i.e. the state is not bimodal in the
    cat basis.
    """
    rho_ss = np.asarray(rho_ss, dtype=complex)
    d = rho_ss.shape[0]
    n_max = d - 1
    evals, evecs = np.linalg.eigh(0.5 * (rho_ss + rho_ss.conj().T))
    order = np.argsort(evals)[::-1]
    P = parity_op(n_max)
    parities = []
    for k in order[:2]:
        v = evecs[:, k]
        parities.append(float(np.real(np.vdot(v, P @ v))))
    if any(abs(p) < 0.9 for p in parities) or parities[0] * parities[1] > 0:
        return None

    a = annihilation(n_max)
    alpha = complex(np.sqrt(np.trace(rho_ss @ a @ a)))
    if abs(alpha) < 1e-8:
        return None
    if parities[0] > 0:
        p_plus, p_minus = float(evals[order[0]]), float(evals[order[1]])
    else:
        p_minus, p_plus = float(evals[order[0]]), float(evals[order[1]])

    c_plus = cat_state(alpha, +1, n_max)
    c_minus = cat_state(alpha, -1, n_max)
    mix = p_plus * np.outer(c_plus, c_plus.conj()) + p_minus * np.outer(c_minus, c_minus.conj())
    mix /= np.trace(mix).real
    return TwoComponentFit(p_plus, p_minus, alpha, uhlmann_fidelity(rho_ss, mix))


def _psd_sqrt_eigvals(M):
    # eigenvalues of a PSD matrix with numerically-zero ones floored to
    # exact 0, so their square roots do not inject O(sqrt(eps)) noise
    evals = np.linalg.eigvalsh(M)
    evals[evals < 1e-12 * max(evals[-1], 0.0)] = 0.0
    return evals


def uhlmann_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    evals, evecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    evals[evals < 1e-12 * max(evals[-1], 0.0)] = 0.0
    sq = (evecs * np.sqrt(evals)) @ evecs.conj().T
    inner = _psd_sqrt_eigvals(sq @ sigma @ sq)
    return float(np.sum(np.sqrt(inner)) ** 2)
