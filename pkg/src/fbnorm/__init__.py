"""Fisher-Bingham normalizing constants on the unit sphere.

The constant ``C(theta, gamma) = integral over S^{p-1} of
exp(sum(-theta_i x_i**2 + gamma_i x_i))`` is evaluated as a one-dimensional
Fourier-type integral with a continuous-Euler-transformed trapezoidal rule.
On top of it sit the gradient, maximum-likelihood fitting and a rejection
sampler.
"""

__version__ = "0.1.0"

from .errors import (
    AccuracyError,
    ConditioningError,
    ConfigurationError,
    DataValidationError,
    FBError,
    LowAcceptanceError,
    NumericalDomainError,
    ParameterDomainError,
    StagnationError,
)
from .euler_quad import EulerConfig, derive_quadrature, weighted_oscillatory_sum
from .mle import FitConfig, FitResult, SufficientStats, fit, sufficient_stats
from .normconst import LogGradient, NormConstResult, log_norm_const_grad, moments, norm_const, norm_const_grad
from .oracles import complex_bingham_exact, mc_sphere_estimate, reference_quadrature
from .params import CanonicalParams, FrameDecomposition, FullParams, from_mean_covariance, shift_normalize
from .sampler import SampleBatch, sample_fb, sample_uniform_sphere

__all__ = [
    "AccuracyError", "CanonicalParams", "ConditioningError", "ConfigurationError",
    "DataValidationError", "EulerConfig", "FBError", "FitConfig", "FitResult",
    "FrameDecomposition", "FullParams", "LogGradient", "LowAcceptanceError",
    "NormConstResult", "NumericalDomainError", "ParameterDomainError", "SampleBatch",
    "StagnationError", "SufficientStats", "complex_bingham_exact", "derive_quadrature",
    "fit", "from_mean_covariance", "log_norm_const_grad", "mc_sphere_estimate", "moments",
    "norm_const", "norm_const_grad", "reference_quadrature", "sample_fb",
    "sample_uniform_sphere", "shift_normalize", "sufficient_stats", "weighted_oscillatory_sum",
]
