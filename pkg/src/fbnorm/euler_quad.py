"""Trapezoidal quadrature of Fourier-type integrals with a continuous Euler taper.

The integrand is multiplied by the smooth window

    w(x) = erfc(x / taper_scale - taper_shift) / 2

which is ~1 near the origin and falls to ~0 past ``taper_scale * taper_shift``.
Tapering turns the slowly decaying oscillatory tail into something the plain
trapezoidal rule integrates with root-exponential accuracy in ``N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import special

from .errors import ConfigurationError, NumericalDomainError

DEFAULT_N = 200
DEFAULT_OMEGA_D = 1.0
DEFAULT_OMEGA_U = 2.0
DEFAULT_D = 1.0


def erfc(x):
    """Complementary error function, vectorized over numpy input."""
    return special.erfc(x)


def max_distance(n_points, omega_d=DEFAULT_OMEGA_D, omega_u=DEFAULT_OMEGA_U):
    """Largest singularity distance ``d`` that ``n_points`` can support."""
    return math.pi * omega_d**2 * n_points / (2.0 * (omega_d + omega_u) * omega_u**2)


def min_points(d, omega_d=DEFAULT_OMEGA_D, omega_u=DEFAULT_OMEGA_U):
    return 2.0 * d * (omega_d + omega_u) * omega_u**2 / (math.pi * omega_d**2)


@dataclass(frozen=True)
class EulerConfig:
    N: int
    omega_d: float
    omega_u: float
    d: float
    h: float
    taper_scale: float
    taper_shift: float

    @cached_property
    def nodes(self) -> np.ndarray:
        """Grid ``n*h`` for ``n = -N-1, ..., N`` (one extra node on the negative side)."""
        nodes = np.arange(-self.N - 1, self.N + 1, dtype=float) * self.h
        nodes.setflags(write=False)
        return nodes

    @cached_property
    def weights(self) -> np.ndarray:
        """``h * w(|t|)`` at every node."""
        w = self.h * euler_weight(np.abs(self.nodes), self)
        w.setflags(write=False)
        return w

    def to_dict(self):
        return {
            "N": self.N,
            "omega_d": self.omega_d,
            "omega_u": self.omega_u,
            "d": self.d,
            "h": self.h,
            "taper_scale": self.taper_scale,
            "taper_shift": self.taper_shift,
        }


def derive_quadrature(
    N: int = DEFAULT_N,
    omega_d: float = DEFAULT_OMEGA_D,
    omega_u: float = DEFAULT_OMEGA_U,
    d: float = DEFAULT_D,
) -> EulerConfig:
    """Grid step and taper parameters for a given node count and window."""
    if int(N) != N or N < 1:
        raise ConfigurationError(f"N must be a positive integer, got {N!r}")
    N = int(N)
    if not (np.isfinite(d) and d > 0):
        raise ConfigurationError(f"d must be positive, got {d!r}")
    if not omega_d <= 1.0:
        raise ConfigurationError(f"omega_d <= 1 violated (omega_d={omega_d})")
    if not omega_u >= 1.0:
        raise ConfigurationError(f"omega_u >= 1 violated (omega_u={omega_u})")
    if not omega_d > 0:
        raise ConfigurationError(f"omega_d must be positive (omega_d={omega_d})")
    if not omega_d / omega_u <= 0.5:
        raise ConfigurationError(
            f"omega_d/omega_u <= 1/2 violated (omega_d/omega_u={omega_d / omega_u:.6g})"
        )
    bound = min_points(d, omega_d, omega_u)
    if N < bound * (1.0 - 1e-12):
        raise ConfigurationError(
            f"N >= 2d(omega_d+omega_u)omega_u^2/(pi omega_d^2) violated (N={N}, bound={bound:.6g})"
        )
    h = math.sqrt(2.0 * math.pi * d * (omega_d + omega_u) / (omega_d**2 * N))
    return EulerConfig(
        N=N,
        omega_d=float(omega_d),
        omega_u=float(omega_u),
        d=float(d),
        h=h,
        taper_scale=math.sqrt(N * h / omega_d),
        taper_shift=math.sqrt(omega_d * N * h / 4.0),
    )


def euler_weight(x, config: EulerConfig):
    return 0.5 * erfc(np.asarray(x, dtype=float) / config.taper_scale - config.taper_shift)


def weighted_sums(values, config: EulerConfig):
    """Tapered trapezoidal sums of integrand samples already taken on ``config.nodes``.

    ``values`` has the node axis last; leading axes index independent
    integrands that share the grid.  Summation is numpy's pairwise reduction
    over a contiguous axis, so the result does not depend on threading.
    """
    values = np.ascontiguousarray(values)
    if values.shape[-1] != config.nodes.shape[0]:
        raise ValueError(
            f"expected {config.nodes.shape[0]} node samples, got {values.shape[-1]}"
        )
    bad = ~np.isfinite(values)
    if bad.any():
        idx = np.argwhere(bad)[0]
        node = int(idx[-1])
        raise NumericalDomainError(
            f"non-finite integrand value at node n={node - config.N - 1} "
            f"(t={config.nodes[node]:.6g})",
            node=node - config.N - 1,
        )
    return np.sum(values * config.weights, axis=-1)


def weighted_oscillatory_sum(g, config: EulerConfig) -> complex:
    """``h * sum_n w(|n h|) g(n h)`` over the asymmetric grid.

    ``g`` is called once with the full node array and must return one complex
    value per node; the caller folds the oscillatory factor into it.
    """
    values = np.asarray(g(config.nodes), dtype=complex)
    if values.shape != config.nodes.shape:
        raise ValueError("g must return one value per node")
    return complex(weighted_sums(values, config))
