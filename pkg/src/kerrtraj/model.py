"""Physical models for the driven dissipative Kerr resonator.

Rates and drive amplitudes are expressed in units of the two-photon
dissipation rate, which is the unit of time throughout (time = 1 means one
inverse two-photon-loss time).  hbar = 1.
"""

from dataclasses import dataclass

import numpy as np

from .fock import annihilation

__all__ = [
    "ModelParams",
    "hamiltonian",
    "hamiltonian_two_photon",
    "hamiltonian_one_photon",
    "jump_operators",
]


@dataclass(frozen=True)
class ModelParams:
    """Rates and drive amplitudes of the Kerr resonator, in units of eta.

    U      Kerr photon-photon interaction strength
    G      two-photon (parametric) drive amplitude
    F      one-photon (coherent) drive amplitude
    gamma  one-photon loss rate
    eta    two-photon loss rate (1.0 by convention)
    n_max  Fock-basis cutoff
    """

    U: float = 1.0
    G: float = 0.0
    F: float = 0.0
    gamma: float = 0.1
    eta: float = 1.0
    n_max: int = 15

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return self.n_max + 1


def hamiltonian_two_photon(params: ModelParams) -> np.ndarray:
    """H = (U/2) a^dag a^dag a a + (G/2) (a^dag^2 + a^2), on resonance."""
    a = annihilation(params.n_max)
    ad = a.conj().T
    return 0.5 * params.U * (ad @ ad @ a @ a) + 0.5 * params.G * (ad @ ad + a @ a)


def hamiltonian_one_photon(params: ModelParams) -> np.ndarray:
    """H = (U/2) a^dag a^dag a a + F (a^dag + a), on resonance."""
    a = annihilation(params.n_max)
    ad = a.conj().T
    return 0.5 * params.U * (ad @ ad @ a @ a) + params.F * (ad + a)


def hamiltonian(params: ModelParams) -> np.ndarray:
    """Kerr term plus whichever drives are switched on.

    Reduces to :func:`hamiltonian_two_photon` for F = 0 and to
    :func:`hamiltonian_one_photon` for G = 0; both drives at once is
    allowed for exploratory runs.
    """
    a = annihilation(params.n_max)
    ad = a.conj().T
    H = 0.5 * params.U * (ad @ ad @ a @ a)
    if params.G != 0.0:
        H = H + 0.5 * params.G * (ad @ ad + a @ a)
    if params.F != 0.0:
        H = H + params.F * (ad + a)
    return H


def jump_operators(params: ModelParams):
    """Loss channels as (operator, label) pairs; zero-rate channels omitted.

    One-photon loss sqrt(gamma) a carries label "1ph", two-photon loss
    sqrt(eta) a^2 carries label "2ph".
    """
    a = annihilation(params.n_max)
    ops = []
    if params.gamma > 0:
        ops.append((np.sqrt(params.gamma) * a, "1ph"))
    if params.eta > 0:
        ops.append((np.sqrt(params.eta) * (a @ a), "2ph"))
    return ops
