"""Solvers, closed forms and diagnostics for a degenerate coupled diffusion system.

The unknowns are a transported quantity ``v`` and a heat-like density
``w >= 0`` whose own diffusivity and the viscosity acting on ``v`` both
vanish where ``w`` does.
"""
from .errors import ConfigurationError, DomainError, FitError, NumericError, StepRejected
from .model import Coefficients, EntropySpec, State, grid_state
from .solver import PiecewiseLaw, SnapshotSeries, SolverConfig, run

__all__ = [
    "Coefficients", "ConfigurationError", "DomainError", "EntropySpec", "FitError", "NumericError",
    "PiecewiseLaw", "SnapshotSeries", "SolverConfig", "State", "StepRejected", "grid_state", "run",
]
__version__ = "0.1.0"
