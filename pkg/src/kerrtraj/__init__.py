"""Quantum trajectories for the two-photon-driven dissipative Kerr resonator.

The same bimodal steady state looks completely different along single
monitored realizations: photon counting shows parity switching between
the two cat states, ideal homodyne detection shows phase switching
between the two coherent states.
"""

from .analysis import EnsembleResult, SwitchReport, WignerGrid, detect_switches, ensemble_average, histogram_modes, stationary_histogram, wigner
from .counting import run_counting, step_counting
from .errors import IntegrationError, KerrTrajError, MultipleSteadyStatesError, StepSizeError
from .fock import (
    annihilation,
    cat_state,
    coherent_state,
    creation,
    density_from_state,
    expval,
    fidelity_states,
    fock_state,
    normalize,
    number_op,
    parity_op,
    quadratures,
)
from .homodyne import WienerStream, homodyne_currents, run_homodyne, step_homodyne
from .master import TwoComponentFit, build_liouvillian, evolve_me, fit_two_component, liouvillian_for, steady_state
from .model import ModelParams, hamiltonian, hamiltonian_one_photon, hamiltonian_two_photon, jump_operators
from .record import JumpEvent, TrajectoryRecord

__version__ = "0.1.0"
