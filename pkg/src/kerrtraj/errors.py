"""Exception types shared across the simulation engines."""

__all__ = ["KerrTrajError", "IntegrationError", "StepSizeError", "MultipleSteadyStatesError"]


class KerrTrajError(RuntimeError):
    """Base class for numerical failures in this package."""


class IntegrationError(KerrTrajError):
    """A time integrator violated its accuracy or sanity contract."""


class StepSizeError(IntegrationError):
    """The time step is too large for the stochastic jump scheme."""


class MultipleSteadyStatesError(KerrTrajError):
    """The Liouvillian null space has dimension > 1 (e.g. gamma = 0)."""
