"""Capacity bounds for noiseless bosonic wiretap channels.

Single-mode lower/upper private-capacity bounds, multi-mode reduction to
parallel channels, optimal photon-number allocation, and Monte Carlo
bounds for randomly fluctuating (turbulent) channels.  See the README for
the command-line interface.
"""

from .allocation import (
    Allocation,
    BoundKind,
    allocate,
    allocate_bruteforce,
    asymptotic_multimode,
    marginal_rate,
    multi_mode_bound,
)
from .entropy_core import (
    BoundValue,
    asymptotic_coefficients,
    capacity_infinite,
    g_entropy,
    lower_bound_single,
    photon_efficiency,
    upper_bound_single,
)
from .errors import ConvergenceError, DomainError
from .mode_algebra import (
    CascadeMoments,
    ModeSpectrum,
    UnitaryTransition,
    cascade_moments,
    degraded_splitter,
    haar_unitary,
    hermitian_eigen,
    mode_decompose,
    unitarity_residual,
    validate_unitary,
)
from .turbulence import (
    EnsembleSpec,
    MonteCarloEstimate,
    SecondMomentMatrix,
    majorizes,
    monte_carlo_lower,
    sample_channel,
    second_moment,
    turbulence_lower_bound,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "BoundKind",
    "BoundValue",
    "CascadeMoments",
    "ConvergenceError",
    "DomainError",
    "EnsembleSpec",
    "ModeSpectrum",
    "MonteCarloEstimate",
    "SecondMomentMatrix",
    "UnitaryTransition",
    "allocate",
    "allocate_bruteforce",
    "asymptotic_coefficients",
    "asymptotic_multimode",
    "capacity_infinite",
    "cascade_moments",
    "degraded_splitter",
    "g_entropy",
    "haar_unitary",
    "hermitian_eigen",
    "lower_bound_single",
    "majorizes",
    "marginal_rate",
    "mode_decompose",
    "monte_carlo_lower",
    "multi_mode_bound",
    "photon_efficiency",
    "sample_channel",
    "second_moment",
    "turbulence_lower_bound",
    "unitarity_residual",
    "upper_bound_single",
    "validate_unitary",
    "__version__",
]
