"""Dense linear algebra on a truncated Fock space.

All states are complex vectors over the number basis {|0>, ..., |n_max>},
all operators dense (n_max+1) x (n_max+1) complex matrices.  Dimensions in
this package stay small (<= ~64), so nothing here is sparse.
"""

import warnings

import numpy as np

__all__ = [
    "TruncationWarning",
    "annihilation",
    "creation",
    "number_op",
    "parity_op",
    "quadratures",
    "fock_state",
    "coherent_state",
    "cat_state",
    "expval",
    "normalize",
    "fidelity_states",
    "is_hermitian",
    "density_from_state",
    "check_density_matrix",
]

# Pre-normalization norm deficit above which coherent_state warns that the
# basis cutoff is biting.  Sized to admit amplitudes up to |alpha| ~ 2.2 at
# n_max = 15 (tail ~ 5e-5) while catching genuinely under-resolved states.
TRUNCATION_TOL = 1e-4


class TruncationWarning(UserWarning):
    """The Fock-basis cutoff discards a non-negligible amplitude tail."""


def _check_n_max(n_max):
    if not isinstance(n_max, (int, np.integer)) or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")


def annihilation(n_max: int) -> np.ndarray:
    """Annihilation operator a with matrix elements <n-1|a|n> = sqrt(n)."""
    _check_n_max(n_max)
    a = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    ns = np.arange(1, n_max + 1)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def creation(n_max: int) -> np.ndarray:
    """Creation operator a^dagger (conjugate transpose of ``annihilation``)."""
    return annihilation(n_max).conj().T


def number_op(n_max: int) -> np.ndarray:
    """Photon-number operator, diagonal (0, 1, ..., n_max)."""
    _check_n_max(n_max)
    return np.diag(np.arange(n_max + 1, dtype=float)).astype(complex)


def parity_op(n_max: int) -> np.ndarray:
    """Photon-number parity, diagonal (+1, -1, +1, ...)."""
    _check_n_max(n_max)
    return np.diag((-1.0) ** np.arange(n_max + 1)).astype(complex)


def quadratures(n_max: int):
    """Field quadratures x = (a^dag + a)/2 and p = i(a^dag - a)/2."""
    a = annihilation(n_max)
    ad = a.conj().T
    x = 0.5 * (ad + a)
    p = 0.5j * (ad - a)
    return x, p


def fock_state(n: int, n_max: int) -> np.ndarray:
    """Number state |n> as a unit vector."""
    _check_n_max(n_max)
    if not 0 <= n <= n_max:
        raise ValueError(f"n={n} outside truncated basis 0..{n_max}")
    psi = np.zeros(n_max + 1, dtype=complex)
    psi[n] = 1.0
    return psi


def _coherent_amplitudes(alpha, n_max):
    # Stable recurrence c_{n+1} = c_n * alpha / sqrt(n+1); avoids factorials.
    c = np.zeros(n_max + 1, dtype=complex)
    c[0] = 1.0
    for n in range(n_max):
        c[n + 1] = c[n] * alpha / np.sqrt(n + 1.0)
    return c * np.exp(-0.5 * abs(alpha) ** 2)


def coherent_state(alpha: complex, n_max: int) -> np.ndarray:
    """Coherent state |alpha>, renormalized on the truncated basis.

    Warns with :class:`TruncationWarning` when the discarded Poisson tail
    exceeds ``TRUNCATION_TOL`` in norm; the returned vector is always
    unit-norm.
    """
    _check_n_max(n_max)
    c = _coherent_amplitudes(alpha, n_max)
    norm = np.linalg.norm(c)
    deficit = abs(1.0 - norm**2)
    if deficit > TRUNCATION_TOL:
        warnings.warn(
            f"coherent_state(alpha={alpha}): truncated norm deficit "
            f"{deficit:.3e} exceeds {TRUNCATION_TOL:.0e}; increase n_max",
            TruncationWarning,
            stacklevel=2,
        )
    return c / norm


def cat_state(alpha: complex, parity: int, n_max: int) -> np.ndarray:
    """Even (parity=+1) or odd (parity=-1) cat state ~ |alpha> +- |-alpha>.

    Built by projecting the coherent amplitudes onto one parity sector, so
    off-sector amplitudes are exactly zero.  The odd cat is undefined at
    alpha = 0.
    """
    _check_n_max(n_max)
    if parity not in (+1, -1):
        raise ValueError(f"parity must be +1 or -1, got {parity!r}")
    if parity == -1 and alpha == 0:
        raise ValueError("odd cat state is degenerate (zero vector) at alpha = 0")
    c = _coherent_amplitudes(alpha, n_max)
    keep = np.arange(n_max + 1) % 2 == (0 if parity == +1 else 1)
    c = np.where(keep, c, 0.0)
    norm = np.linalg.norm(c)
    if norm == 0.0:
        raise ValueError("cat state has zero norm on the truncated basis")
    return c / norm


def expval(state: np.ndarray, obs: np.ndarray) -> complex:
    """<psi|O|psi> for a state vector, Tr[rho O] for a density matrix."""
    state = np.asarray(state)
    obs = np.asarray(obs)
    if state.ndim == 1:
        if obs.shape != (state.size, state.size):
            raise ValueError(f"dimension mismatch: state {state.shape}, obs {obs.shape}")
        return complex(np.vdot(state, obs @ state))
    if state.ndim == 2:
        if obs.shape != state.shape:
            raise ValueError(f"dimension mismatch: rho {state.shape}, obs {obs.shape}")
        return complex(np.trace(state @ obs))
    raise ValueError(f"state must be a vector or a square matrix, got ndim={state.ndim}")


def normalize(psi: np.ndarray) -> np.ndarray:
    """Return psi / ||psi||."""
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return psi / norm


def fidelity_states(psi: np.ndarray, phi: np.ndarray) -> float:
    """Pure-state fidelity |<psi|phi>|^2."""
    return float(abs(np.vdot(psi, phi)) ** 2)


def is_hermitian(op: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(op - op.conj().T)) <= tol)


def density_from_state(psi: np.ndarray) -> np.ndarray:
    """Projector |psi><psi|."""
    return np.outer(psi, psi.conj())


def check_density_matrix(rho, herm_tol=1e-10, trace_tol=1e-8, eig_floor=-1e-8):
    """Validate Hermiticity, unit trace and positivity; raise ValueError if violated."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"density matrix not Hermitian: max |rho - rho^dag| = {herm:.3e}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr!r} deviates from 1 beyond {trace_tol:.0e}")
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    if min_eig < eig_floor:
        raise ValueError(f"density matrix has negative eigenvalue {min_eig:.3e}")
    return rho
