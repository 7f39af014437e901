"""Normalizing constant of the Fisher-Bingham distribution and its gradient.

For canonical parameters (``min(theta) == 0``, ``gamma >= 0``) and a contour
shift ``t0 = -d``,

    C = pi**(p/2 - 1) * exp(-t0) * Re sum_n h w(|t_n|) A(t_n) exp(-i t_n)

The exact integral is real, so the relative size of the imaginary part of the
sum is a free accuracy diagnostic.  Everything is carried in log space: the
integrand is rescaled by its largest modulus before exponentiation and the
scale is added back to ``log C``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import euler_quad
from .errors import AccuracyError
from .euler_quad import EulerConfig, derive_quadrature
from .integrand import (
    ContourConfig,
    auto_distance,
    contour_points,
    gamma_factor,
    log_integrand,
    select_contour,
    theta_factor,
)
from .params import CanonicalParams, require_sphere_dim, shift_normalize

IMAG_RESIDUAL_GATE = 1e-8


@dataclass(frozen=True)
class NormConstResult:
    log_value: float
    value: Optional[float]
    imag_residual: float
    quad: EulerConfig
    contour: ContourConfig

    def to_dict(self):
        return {
            "log_value": self.log_value,
            "value": self.value,
            "imag_residual": self.imag_residual,
            "quadrature": self.quad.to_dict(),
            "t0": self.contour.t0,
        }


@dataclass(frozen=True)
class LogGradient:
    """``log C`` together with ``d log C / d theta`` and ``d log C / d gamma``."""

    log_value: float
    dlog_theta: np.ndarray
    dlog_gamma: np.ndarray
    imag_residual: float

    @property
    def dtheta(self):
        return np.exp(self.log_value) * self.dlog_theta

    @property
    def dgamma(self):
        return np.exp(self.log_value) * self.dlog_gamma


def resolve_quadrature(
    params: CanonicalParams,
    quad: Optional[EulerConfig] = None,
    *,
    n_points: int = euler_quad.DEFAULT_N,
    omega_d: float = euler_quad.DEFAULT_OMEGA_D,
    omega_u: float = euler_quad.DEFAULT_OMEGA_U,
    d: Optional[float] = None,
) -> EulerConfig:
    """Quadrature to use for ``params``; ``d=None`` picks the contour automatically."""
    if quad is not None:
        return quad
    if d is None:
        normalized, _, _ = shift_normalize(params)
        d = auto_distance(normalized, n_points, omega_d, omega_u)
    return derive_quadrature(n_points, omega_d, omega_u, d)


def _safe_exp(x):
    return math.exp(x) if x < 709.0 else None


def _sums(params, quad, with_grad):
    normalized, shift, flips = shift_normalize(params)
    contour = select_contour(normalized.theta, quad.d)
    t = quad.nodes
    z = contour_points(t, normalized, contour)
    log_a = log_integrand(z, normalized.gamma)
    scale = float(np.max(log_a.real))
    a = np.exp(log_a - scale - 1j * t)
    s0 = complex(euler_quad.weighted_sums(a, quad))
    grads = None
    if with_grad:
        s_theta = euler_quad.weighted_sums(a * theta_factor(z, normalized.gamma), quad)
        s_gamma = euler_quad.weighted_sums(a * gamma_factor(z, normalized.gamma), quad)
        grads = (s_theta.real, s_gamma.real * flips)
    if not s0.real > 0:
        raise AccuracyError(
            f"quadrature sum has non-positive real part {s0.real:.3e}; "
            "increase N or adjust the contour distance d"
        )
    imag_residual = abs(s0.imag) / abs(s0.real)
    p = params.p
    log_value = (
        -shift + (0.5 * p - 1.0) * math.log(math.pi) - contour.t0 + scale + math.log(s0.real)
    )
    return log_value, imag_residual, s0.real, grads, contour


def _gate(imag_residual, check):
    if check and not imag_residual < IMAG_RESIDUAL_GATE:
        raise AccuracyError(
            f"imaginary residual {imag_residual:.3e} exceeds {IMAG_RESIDUAL_GATE:g}; "
            "increase N or adjust the contour distance d",
            imag_residual=imag_residual,
        )


def norm_const(
    params: CanonicalParams,
    quad: Optional[EulerConfig] = None,
    *,
    n_points: int = euler_quad.DEFAULT_N,
    omega_d: float = euler_quad.DEFAULT_OMEGA_D,
    omega_u: float = euler_quad.DEFAULT_OMEGA_U,
    d: Optional[float] = None,
    check: bool = True,
) -> NormConstResult:
    require_sphere_dim(params)
    quad = resolve_quadrature(
        params, quad, n_points=n_points, omega_d=omega_d, omega_u=omega_u, d=d
    )
    log_value, imag_residual, _, _, contour = _sums(params, quad, False)
    _gate(imag_residual, check)
    return NormConstResult(log_value, _safe_exp(log_value), imag_residual, quad, contour)


def log_norm_const_grad(
    params: CanonicalParams,
    quad: Optional[EulerConfig] = None,
    *,
    n_points: int = euler_quad.DEFAULT_N,
    omega_d: float = euler_quad.DEFAULT_OMEGA_D,
    omega_u: float = euler_quad.DEFAULT_OMEGA_U,
    d: Optional[float] = None,
    check: bool = True,
) -> LogGradient:
    """One pass over the grid for ``log C`` and all ``2p`` log-partials."""
    require_sphere_dim(params)
    quad = resolve_quadrature(
        params, quad, n_points=n_points, omega_d=omega_d, omega_u=omega_u, d=d
    )
    log_value, imag_residual, s0, (s_theta, s_gamma), _ = _sums(params, quad, True)
    _gate(imag_residual, check)
    return LogGradient(log_value, s_theta / s0, s_gamma / s0, imag_residual)


def norm_const_grad(params: CanonicalParams, quad: Optional[EulerConfig] = None, **kwargs):
    """``(dC/dtheta, dC/dgamma)``."""
    g = log_norm_const_grad(params, quad, **kwargs)
    return g.dtheta, g.dgamma


def moments(params: CanonicalParams, quad: Optional[EulerConfig] = None, **kwargs):
    """``(E[x], E[x**2])`` per coordinate, from ``dC/dgamma / C`` and ``-dC/dtheta / C``."""
    g = log_norm_const_grad(params, quad, **kwargs)
    return g.dlog_gamma, -g.dlog_theta
