"""Kernel-based regularization for the Cauchy problem of coupled elliptic sine-Gordon equations."""

from .errors import (
    ConfigurationError,
    DomainError,
    HypothesisError,
    IncompatibleGridError,
    InvalidIndexError,
    OrderingError,
    SaturationError,
    StudyError,
)
from .kernel import KernelParams, filter_value, lemma1_bound, shifted_filter_value
from .manufactured import manufactured_problem
from .model import CauchyData, GevreyParams, NoisySample, ProblemSpec, make_noisy
from .solver import (
    Discretization,
    RegularizationConfig,
    Trajectory,
    evaluate_exact_mild,
    solve_regularized,
    trajectory_error,
)
from .spectral_basis import BasisConfig, GridFunction, SpectralField

__version__ = "0.1.0"
