"""Reference values that do not go through the Euler-transformed quadrature.

* the closed form of the complex Bingham constant (partial fractions of
  ``exp(-x)``), evaluated in extended precision because the double-precision
  sum cancels badly;
* plain Monte Carlo integration over uniform sphere samples;
* the same quadrature at a much larger node count, for convergence studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from . import euler_quad
from ._streams import BLOCK_SIZE, block_rng, map_blocks, uniform_block
from .errors import ConditioningError, ConfigurationError, ParameterDomainError
from .normconst import norm_const, resolve_quadrature
from .params import CanonicalParams, log_sphere_area, require_sphere_dim
from .sampler import envelope_bound

MIN_GAP = 1e-6


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    n_samples: int
    seed: int


def complex_bingham_exact(theta_c, dps: int = 50) -> float:
    """``2 pi**p sum_j exp(-theta_j) / prod_{k != j} (theta_k - theta_j)``."""
    theta_c = [float(v) for v in theta_c]
    p = len(theta_c)
    if p < 2:
        raise ParameterDomainError("complex dimension must be at least 2")
    gaps = np.diff(np.sort(theta_c))
    if np.min(gaps) < MIN_GAP:
        raise ConditioningError(
            f"entries closer than {MIN_GAP:g} (min gap {np.min(gaps):.3g}); "
            "the partial-fraction formula is ill-conditioned there"
        )
    with mpmath.workdps(dps):
        th = [mpmath.mpf(v) for v in theta_c]
        total = mpmath.mpf(0)
        for j in range(p):
            denom = mpmath.mpf(1)
            for k in range(p):
                if k != j:
                    denom *= th[k] - th[j]
            total += mpmath.exp(-th[j]) / denom
        return float(2 * mpmath.pi**p * total)


def complex_to_real_theta(theta_c) -> np.ndarray:
    """Real Bingham parameters on S^{2p-1} equivalent to complex ones: each entry twice."""
    return np.repeat(np.asarray(theta_c, dtype=float), 2)


def mc_sphere_estimate(params: CanonicalParams, n_samples: int, seed: int = 0) -> McEstimate:
    """Area times the sample mean of the unnormalized density at uniform points."""
    require_sphere_dim(params)
    if n_samples < 1000:
        raise ParameterDomainError("n_samples must be at least 1000")
    # integrand / exp(M) lies in (0, 1], so the moments cannot overflow
    M = envelope_bound(params)
    n_blocks = -(-n_samples // BLOCK_SIZE)

    def run(block):
        size = min(BLOCK_SIZE, n_samples - block * BLOCK_SIZE)
        x = uniform_block(block_rng(seed, block), BLOCK_SIZE, params.p)[:size]
        v = np.exp(params.exponent(x) - M)
        return float(np.sum(v)), float(np.sum(v * v))

    parts = map_blocks(run, range(n_blocks))
    mean = math.fsum(s for s, _ in parts) / n_samples
    second = math.fsum(q for _, q in parts) / n_samples
    var = max(second - mean * mean, 0.0) * n_samples / (n_samples - 1)
    scale = math.exp(log_sphere_area(params.p) + M)
    return McEstimate(scale * mean, scale * math.sqrt(var / n_samples), n_samples, seed)


def reference_quadrature(
    params: CanonicalParams,
    N_big: int = 4 * euler_quad.DEFAULT_N,
    *,
    base_n: int = euler_quad.DEFAULT_N,
    omega_d: float = euler_quad.DEFAULT_OMEGA_D,
    omega_u: float = euler_quad.DEFAULT_OMEGA_U,
    d: Optional[float] = None,
) -> float:
    """``C`` at ``N_big`` nodes with the window and contour the ``base_n`` run would use."""
    if N_big < 4 * base_n:
        raise ConfigurationError(f"N_big={N_big} must be at least 4 x base N ({4 * base_n})")
    if d is None:
        d = resolve_quadrature(params, n_points=base_n, omega_d=omega_d, omega_u=omega_u).d
    return norm_const(params, n_points=N_big, omega_d=omega_d, omega_u=omega_u, d=d).value
