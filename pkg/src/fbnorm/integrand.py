"""Fourier-representation integrand of the normalizing constant and its partials.

With ``z_i(t) = theta_i - i t - t0`` the integrand is

    A(t) = prod_i exp(gamma_i**2 / (4 z_i)) / sqrt(z_i)

evaluated on the principal branch.  Choosing ``t0 < min(theta)`` keeps every
``Re z_i >= d > 0`` so the square roots never cross the branch cut.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import euler_quad
from .errors import ParameterDomainError
from .params import CanonicalParams

AUTO_MIN_DISTANCE = 5.0


@dataclass(frozen=True)
class ContourConfig:
    t0: float
    d: float


def select_contour(theta, target_d: float = euler_quad.DEFAULT_D) -> ContourConfig:
    if not target_d > 0:
        raise ParameterDomainError(f"target_d must be positive, got {target_d!r}")
    t0 = float(np.min(theta)) - float(target_d)
    return ContourConfig(t0=t0, d=float(target_d))


def saddle_distance(params: CanonicalParams) -> float:
    """Distance ``s = min(theta) - t0`` minimizing the integrand's modulus at ``t = 0``.

    At this point the real-axis integrand is of the same order as the final
    answer, so the oscillatory sum does not cancel away significant digits.
    The log modulus is convex in ``s`` and its derivative increases from -inf
    to 1, so the root is unique.
    """
    theta = params.theta - np.min(params.theta)
    g2 = params.gamma**2

    def slope(s):
        z = theta + s
        return 1.0 - np.sum(g2 / (4.0 * z * z) + 0.5 / z)

    # slope(hi) > 1/4 by construction; slope -> -inf as s -> 0 through the min(theta) term.
    hi = params.p + math.sqrt(float(np.sum(g2))) + 1.0
    return float(brentq(slope, 1e-12, hi, xtol=1e-10))


def auto_distance(
    params: CanonicalParams,
    n_points: int = euler_quad.DEFAULT_N,
    omega_d: float = euler_quad.DEFAULT_OMEGA_D,
    omega_u: float = euler_quad.DEFAULT_OMEGA_U,
) -> float:
    """Contour distance used when the caller does not pin ``d``.

    The saddle distance, floored at ``AUTO_MIN_DISTANCE`` and capped by what
    ``n_points`` admits.  When the cap binds the result loses accuracy; a
    RuntimeWarning suggests a larger node count.
    """
    cap = euler_quad.max_distance(n_points, omega_d, omega_u)
    s = saddle_distance(params)
    if s > cap:
        warnings.warn(
            f"saddle distance {s:.3g} exceeds the limit {cap:.3g} for N={n_points}; "
            f"N >= {math.ceil(euler_quad.min_points(s, omega_d, omega_u))} is needed "
            "for full accuracy",
            RuntimeWarning,
            stacklevel=3,
        )
    return min(max(s, AUTO_MIN_DISTANCE), cap)


def _check_contour(params: CanonicalParams, contour: ContourConfig):
    if not contour.t0 < np.min(params.theta):
        raise ParameterDomainError(
            f"contour shift t0={contour.t0} must lie strictly below min(theta)={np.min(params.theta)}"
        )


def contour_points(t, params: CanonicalParams, contour: ContourConfig) -> np.ndarray:
    """``z_i(t)`` with shape ``(p,) + shape(t)``."""
    _check_contour(params, contour)
    t = np.asarray(t, dtype=float)
    shift = (params.theta - contour.t0).reshape((-1,) + (1,) * t.ndim)
    return shift - 1j * t


def log_integrand(z, gamma) -> np.ndarray:
    """``log A`` from precomputed contour points ``z`` (coordinate axis first)."""
    g2 = (np.asarray(gamma) ** 2).reshape((-1,) + (1,) * (z.ndim - 1))
    return np.sum(g2 / (4.0 * z) - 0.5 * np.log(z), axis=0)


def integrand_value(t, params: CanonicalParams, contour: ContourConfig):
    z = contour_points(t, params, contour)
    out = np.exp(log_integrand(z, params.gamma))
    return out[()] if out.ndim == 0 else out


def theta_factor(z, gamma):
    """``dA/dtheta_i = A * theta_factor``; coordinate axis first."""
    g2 = (np.asarray(gamma) ** 2).reshape((-1,) + (1,) * (z.ndim - 1))
    return -g2 / (4.0 * z * z) - 0.5 / z


def gamma_factor(z, gamma):
    """``dA/dgamma_i = A * gamma_factor``; coordinate axis first."""
    g = np.asarray(gamma).reshape((-1,) + (1,) * (z.ndim - 1))
    return g / (2.0 * z)


def _check_index(i, params):
    if not 0 <= i < params.p:
        raise IndexError(f"coordinate index {i} out of range for p={params.p}")


def integrand_dtheta(t, i: int, params: CanonicalParams, contour: ContourConfig):
    _check_index(i, params)
    z = contour_points(t, params, contour)
    a = np.exp(log_integrand(z, params.gamma))
    out = a * theta_factor(z[i : i + 1], params.gamma[i : i + 1])[0]
    return out[()] if out.ndim == 0 else out


def integrand_dgamma(t, i: int, params: CanonicalParams, contour: ContourConfig):
    _check_index(i, params)
    z = contour_points(t, params, contour)
    a = np.exp(log_integrand(z, params.gamma))
    out = a * gamma_factor(z[i : i + 1], params.gamma[i : i + 1])[0]
    return out[()] if out.ndim == 0 else out
