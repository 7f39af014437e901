"""Timing of the normalizing constant as a function of dimension."""

from __future__ import annotations

import time
import warnings

import numpy as np
from scipy.stats import linregress

from . import euler_quad
from .normconst import norm_const
from .params import CanonicalParams

DEFAULT_P_LIST = tuple(range(10, 201, 10))


def random_params(p: int, seed: int = 0) -> CanonicalParams:
    rng = np.random.default_rng([seed, p])
    return CanonicalParams(rng.uniform(0.0, 10.0, p), rng.normal(0.0, 1.0, p))


def _timed(params, quad):
    t = time.perf_counter()
    norm_const(params, check=False, **quad)
    return (time.perf_counter() - t) * 1e3


def run_bench(p_list=DEFAULT_P_LIST, n_points=euler_quad.DEFAULT_N, repeats=10, seed=0,
              omega_d=euler_quad.DEFAULT_OMEGA_D, omega_u=euler_quad.DEFAULT_OMEGA_U, d=None):
    """Median milliseconds per dimension, the imaginary residual of each value, and a linear fit.

    Repeats are interleaved across dimensions so that machine-level drift
    affects every dimension alike.  The accuracy gate is off: beyond p of
    roughly 130 at N=200 the contour distance hits its cap and values degrade,
    but the cost per call does not change.
    """
    quad = {"n_points": n_points, "omega_d": omega_d, "omega_u": omega_u, "d": d}
    cases = [(int(p), random_params(int(p), seed)) for p in p_list]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        residuals = [float(norm_const(params, check=False, **quad).imag_residual) for _, params in cases]
        samples = [[] for _ in cases]
        for _ in range(repeats):
            for k, (_, params) in enumerate(cases):
                samples[k].append(_timed(params, quad))
    rows = [(p, float(np.median(ms))) for (p, _), ms in zip(cases, samples)]
    ps = np.array([r[0] for r in rows], dtype=float)
    ms = np.array([r[1] for r in rows])
    fit = {"slope_ms_per_dim": None, "intercept_ms": None, "r_squared": None}
    if len(rows) >= 3 and np.ptp(ps) > 0:
        lr = linregress(ps, ms)
        fit = {"slope_ms_per_dim": float(lr.slope), "intercept_ms": float(lr.intercept),
               "r_squared": float(lr.rvalue**2)}
    return rows, residuals, fit


def format_bench_csv(rows) -> str:
    return "p,median_ms\n" + "".join(f"{p},{ms!r}\n" for p, ms in rows)
