"""Fisher-Bingham parameterizations and the symmetry reductions between them.

A Fisher-Bingham density on the unit sphere S^{p-1} is proportional to

    exp(-x' Sigma^{-1} x / 2 + x' Sigma^{-1} mu)

Rotating into the eigenframe of Sigma turns the exponent into
``sum(-theta_i y_i**2 + gamma_i y_i)`` with ``y = O x``.  Because ``|x| = 1``
the constant shift ``theta -> theta + c`` only rescales the density by
``exp(-c)``, and flipping the sign of a coordinate flips the sign of the
matching ``gamma_i``.  :func:`shift_normalize` applies both reductions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import ParameterDomainError


def _as_vector(values, name):
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ParameterDomainError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ParameterDomainError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FullParams:
    """Mean and covariance of the Gaussian whose restriction to the sphere is the density."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = _as_vector(self.mu, "mu")
        sigma = np.array(self.sigma, dtype=float)
        p = mu.shape[0]
        if p < 2:
            raise ParameterDomainError("dimension p must be at least 2")
        if sigma.shape != (p, p):
            raise ParameterDomainError(f"sigma must be {p}x{p}, got shape {sigma.shape}")
        if not np.all(np.isfinite(sigma)):
            raise ParameterDomainError("sigma has non-finite entries")
        scale = max(np.max(np.abs(sigma)), np.finfo(float).tiny)
        if np.max(np.abs(sigma - sigma.T)) > 1e-12 * scale:
            raise ParameterDomainError("sigma is not symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        if np.linalg.eigvalsh(sigma)[0] <= 0.0:
            raise ParameterDomainError("sigma is not positive definite")
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def p(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class CanonicalParams:
    """Diagonal-frame parameters: exponent ``sum(-theta_i x_i**2 + gamma_i x_i)``.

    Vectors are stored as read-only float arrays.  ``p == 1`` is accepted so the
    integrand can be evaluated on a single factor; anything that integrates
    over the sphere requires ``p >= 2``.
    """

    theta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        theta = _as_vector(self.theta, "theta")
        gamma = _as_vector(self.gamma, "gamma")
        if theta.shape != gamma.shape:
            raise ParameterDomainError(
                f"theta and gamma differ in length ({theta.shape[0]} vs {gamma.shape[0]})"
            )
        if theta.shape[0] < 1:
            raise ParameterDomainError("parameters must have at least one coordinate")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "gamma", gamma)

    @property
    def p(self) -> int:
        return self.theta.shape[0]

    def exponent(self, x):
        """Unnormalized log density at the rows of ``x``."""
        x = np.asarray(x, dtype=float)
        return -(x**2) @ self.theta + x @ self.gamma

    def to_dict(self):
        return {"theta": self.theta.tolist(), "gamma": self.gamma.tolist()}


def require_sphere_dim(params: CanonicalParams):
    if params.p < 2:
        raise ParameterDomainError("sphere dimension p must be at least 2")


@dataclass(frozen=True)
class FrameDecomposition:
    canonical: CanonicalParams
    orthogonal: np.ndarray
    log_scale: float = 0.0

    def exponent(self, x):
        """Reconstruct the original exponent at the rows of ``x`` (coordinates y = O x)."""
        y = np.asarray(x, dtype=float) @ self.orthogonal.T
        return self.canonical.exponent(y) + self.log_scale


def _fix_signs(vectors):
    # Columns are eigenvectors; make the first non-negligible entry of each positive.
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def from_mean_covariance(full: FullParams) -> FrameDecomposition:
    """Reduce ``(mu, Sigma)`` to ``(theta, gamma)`` in the eigenframe of Sigma.

    Eigenvalues are ordered descending so that theta comes out ascending.
    ``O`` has the eigenvectors as rows, hence ``Sigma = O.T @ diag(delta2) @ O``.
    """
    delta2, vectors = np.linalg.eigh(full.sigma)
    order = np.argsort(-delta2, kind="stable")
    delta2 = delta2[order]
    vectors = _fix_signs(vectors[:, order])
    orthogonal = vectors.T
    theta = 1.0 / (2.0 * delta2)
    gamma = (orthogonal @ full.mu) / delta2
    orthogonal = np.array(orthogonal)
    orthogonal.setflags(write=False)
    return FrameDecomposition(CanonicalParams(theta, gamma), orthogonal, 0.0)


def shift_normalize(params: CanonicalParams):
    """Move to the canonical gauge ``min(theta) == 0`` with ``gamma >= 0``.

    Returns ``(normalized, shift, sign_flips)`` where
    ``C(params) == exp(-shift) * C(normalized)``.
    """
    shift = float(np.min(params.theta))
    flips = np.where(params.gamma < 0, -1.0, 1.0)
    normalized = CanonicalParams(params.theta - shift, np.abs(params.gamma))
    return normalized, shift, flips


def sphere_area(p: int) -> float:
    """Surface area of the unit sphere S^{p-1} in R^p."""
    return float(np.exp(log_sphere_area(p)))


def log_sphere_area(p: int) -> float:
    return float(np.log(2.0) + 0.5 * p * np.log(np.pi) - gammaln(0.5 * p))
