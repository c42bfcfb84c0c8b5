"""Pseudo-spectral solver for the approximate deconvolution model on the 3-torus."""

from .config import ConfigError, SolverConfig, load_config, parse_config
from .dynamics import (
    CFLViolation,
    ForcingSpec,
    ModelSpec,
    SimState,
    SimulationAborted,
    integrate,
    nonlinear_flux,
    pressure_from_flux,
    pressure_solve,
    rhs,
    simulate,
    step,
)
from .operators import FourierMultiplier
from .spectral import SpectralScalarField, SpectralVectorField, TorusSpec

__version__ = "0.1.0"
