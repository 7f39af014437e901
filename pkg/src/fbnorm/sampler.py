"""Rejection sampling from Fisher-Bingham distributions with uniform proposals.

A proposal ``x`` uniform on the sphere is accepted with probability
``exp(g(x) - M)``, where ``g(x) = sum(-theta_i x_i**2 + gamma_i x_i)`` and ``M``
bounds ``g`` from above on the sphere.  For any ``lam > -min(theta)``

    g(x) <= lam + sum(gamma_i**2 / (4 (theta_i + lam)))     for |x| = 1

(complete the square in ``-(theta_i + lam) x_i**2 + gamma_i x_i``).  Taking
``lam = -min(theta) + |gamma| / 2`` gives the simple bound
``-min(theta) + |gamma|``; minimizing over ``lam`` gives the exact maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from ._streams import BLOCK_SIZE, block_rng, map_blocks, thread_count, uniform_block
from .errors import LowAcceptanceError, ParameterDomainError
from .params import CanonicalParams, require_sphere_dim

DEFAULT_MAX_TRIES = 100_000_000


@dataclass(frozen=True)
class SampleBatch:
    X: np.ndarray
    acceptance_rate: float
    seed: int
    proposals: int = 0


def _check_counts(p, n):
    if p < 2:
        raise ParameterDomainError("sphere dimension p must be at least 2")
    if n < 1:
        raise ParameterDomainError("n must be at least 1")


def sample_uniform_sphere(p: int, n: int, seed: int = 0) -> SampleBatch:
    _check_counts(p, n)
    n_blocks = -(-n // BLOCK_SIZE)
    blocks = map_blocks(lambda b: uniform_block(block_rng(seed, b), BLOCK_SIZE, p), range(n_blocks))
    X = np.concatenate(blocks)[:n]
    return SampleBatch(X, 1.0, seed, n)


def simple_bound(params: CanonicalParams) -> float:
    return float(-np.min(params.theta) + np.linalg.norm(params.gamma))


def envelope_bound(params: CanonicalParams, tight: bool = True) -> float:
    """Upper bound of the exponent on the unit sphere (exact maximum when ``tight``)."""
    loose = simple_bound(params)
    if not tight:
        return loose
    tmin = float(np.min(params.theta))
    rel = params.theta - tmin
    g2 = params.gamma**2
    norm = math.sqrt(float(np.sum(g2)))
    if norm == 0.0:
        return -tmin

    # lam is measured from -min(theta); the bound is convex in lam and its
    # slope is non-negative at lam = |gamma| / 2, so the minimizer lies below.
    def slope(lam):
        return 1.0 - float(np.sum(g2 / (4.0 * (rel + lam) ** 2)))

    def bound(lam):
        return -tmin + lam + float(np.sum(g2 / (4.0 * (rel + lam))))

    hi = norm / 2.0
    lo = hi * 1e-15
    if slope(lo) >= 0.0:
        # gamma (nearly) vanishes on the min-theta coordinates; minimizer at ~0
        tight_value = bound(lo)
    elif slope(hi) <= 0.0:
        tight_value = bound(hi)
    else:
        tight_value = bound(brentq(slope, lo, hi, xtol=1e-15 * hi))
    # rounding margin keeps exp(g - M) <= 1 at the maximizer
    return min(loose, tight_value + 1e-12 * max(1.0, abs(tight_value)))


def sample_fb(
    params: CanonicalParams,
    n: int,
    seed: int = 0,
    max_tries: Optional[int] = DEFAULT_MAX_TRIES,
    tight: bool = True,
) -> SampleBatch:
    """Draw exactly ``n`` samples; proposals are generated in index-keyed blocks."""
    require_sphere_dim(params)
    _check_counts(params.p, n)
    M = envelope_bound(params, tight=tight)
    p = params.p
    max_tries = DEFAULT_MAX_TRIES if max_tries is None else int(max_tries)
    max_blocks = max(1, -(-max_tries // BLOCK_SIZE))

    def run(block):
        rng = block_rng(seed, block)
        x = uniform_block(rng, BLOCK_SIZE, p)
        u = rng.random(BLOCK_SIZE)
        keep = u < np.exp(params.exponent(x) - M)
        return x[keep], np.flatnonzero(keep)

    accepted, total = [], 0
    next_block = 0
    wave = max(1, thread_count())
    while total < n and next_block < max_blocks:
        stop = min(next_block + wave, max_blocks)
        for block, (x, idx) in zip(range(next_block, stop), map_blocks(run, range(next_block, stop))):
            need = n - total
            if need <= 0:
                break
            if idx.size >= need:
                accepted.append(x[:need])
                total = n
                proposals = block * BLOCK_SIZE + int(idx[need - 1]) + 1
                break
            accepted.append(x)
            total += idx.size
        next_block = stop

    if total < n:
        tried = next_block * BLOCK_SIZE
        rate = total / tried
        raise LowAcceptanceError(
            f"only {total} of {n} samples accepted in {tried} proposals "
            f"(empirical acceptance rate {rate:.3g}); raise max_tries or reduce |gamma|",
            rate=rate,
            accepted=total,
        )
    X = np.concatenate(accepted)
    return SampleBatch(X, n / proposals, seed, proposals)
