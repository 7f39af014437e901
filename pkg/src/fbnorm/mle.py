"""Maximum-likelihood fitting of Fisher-Bingham parameters to spherical data.

The negative average log-likelihood in a frame ``O`` (data coordinates
``y = O x``) is

    f(theta, gamma, O) = log C(theta, gamma) + sum_i theta_i (O A O')_ii - gamma . (O B)

with ``A`` the mean of ``x x'`` and ``B`` the mean of ``x``.  Its gradient is
the difference between model and sample moments:

    df/dtheta_i = -E[y_i**2] + (O A O')_ii,     df/dgamma_i = E[y_i] - (O B)_i

``f`` is flat along ``theta -> theta + c`` (``tr A = 1``), so theta is only
identified up to that shift; fits report theta with ``min == 0``.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm

from . import euler_quad
from .errors import AccuracyError, DataValidationError, NumericalDomainError, StagnationError
from .normconst import log_norm_const_grad, norm_const
from .params import CanonicalParams

log = logging.getLogger(__name__)

OPTIMIZERS = ("gradient_descent", "quasi_newton")


@dataclass(frozen=True)
class SufficientStats:
    A: np.ndarray
    B: np.ndarray
    n: int

    @property
    def p(self) -> int:
        return self.B.shape[0]

    def rotated(self, O):
        """``(O A O', O B)``."""
        return O @ self.A @ O.T, O @ self.B


def sufficient_stats(X, tol: float = 1e-8) -> SufficientStats:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise DataValidationError(f"data must be a non-empty n x p matrix, got shape {X.shape}")
    if X.shape[1] < 2:
        raise DataValidationError("data must have at least 2 columns")
    if not np.all(np.isfinite(X)):
        rows = np.flatnonzero(~np.all(np.isfinite(X), axis=1))
        raise DataValidationError(f"non-finite values in rows {rows[:10].tolist()}", rows)
    dev = np.abs(np.linalg.norm(X, axis=1) - 1.0)
    bad = np.flatnonzero(dev > tol)
    if bad.size:
        raise DataValidationError(
            f"{bad.size} rows are not unit vectors (first: row {bad[0]}, |norm - 1| = {dev[bad[0]]:.3g})",
            bad,
        )
    n = X.shape[0]
    A = X.T @ X / n
    A = 0.5 * (A + A.T)
    return SufficientStats(A, X.mean(axis=0), n)


@dataclass(frozen=True)
class FitConfig:
    max_iter: int = 20000
    grad_tol: float = 1e-6
    shrink: float = 0.5
    armijo: float = 1e-4
    initial_step: float = 1.0
    min_step: float = 1e-20
    optimize_frame: bool = False
    optimizer: str = "gradient_descent"
    memory: int = 10
    init_theta: Optional[np.ndarray] = None
    init_gamma: Optional[np.ndarray] = None
    init_O: Optional[np.ndarray] = None
    n_points: int = euler_quad.DEFAULT_N
    omega_d: float = euler_quad.DEFAULT_OMEGA_D
    omega_u: float = euler_quad.DEFAULT_OMEGA_U
    d: Optional[float] = None

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")

    @property
    def quad_kwargs(self):
        return {"n_points": self.n_points, "omega_d": self.omega_d, "omega_u": self.omega_u, "d": self.d}


@dataclass(frozen=True)
class FitResult:
    theta_hat: np.ndarray
    gamma_hat: np.ndarray
    O_hat: np.ndarray
    objective_trace: list
    iterations: int
    converged: bool
    final_grad_norm: float
    theta_raw: np.ndarray = field(default=None)
    vhat_norm: float = 0.0

    def to_dict(self):
        return {
            "theta_hat": self.theta_hat.tolist(),
            "gamma_hat": self.gamma_hat.tolist(),
            "theta_raw": self.theta_raw.tolist(),
            "O_hat": self.O_hat.tolist(),
            "objective_trace": list(self.objective_trace),
            "iterations": self.iterations,
            "converged": self.converged,
            "final_grad_norm": self.final_grad_norm,
            "vhat_norm": self.vhat_norm,
        }


def gauge_align(theta):
    """Representative of ``theta + c`` with ``min == 0``."""
    theta = np.asarray(theta, dtype=float)
    return theta - np.min(theta)


def align_to(theta_hat, theta_ref):
    """``theta_hat + c`` with ``c`` minimizing ``|theta_hat + c - theta_ref|``."""
    theta_hat = np.asarray(theta_hat, dtype=float)
    return theta_hat + np.mean(np.asarray(theta_ref, dtype=float) - theta_hat)


def neg_avg_log_lik(theta, gamma, O, stats: SufficientStats, **quad) -> float:
    M, Bt = stats.rotated(np.asarray(O, dtype=float))
    params = CanonicalParams(theta, gamma)
    log_c = norm_const(params, **quad).log_value
    return float(log_c + np.dot(params.theta, np.diag(M)) - np.dot(params.gamma, Bt))


def _value_and_grad(theta, gamma, M, Bt, quad):
    g = log_norm_const_grad(CanonicalParams(theta, gamma), **quad)
    value = g.log_value + float(np.dot(theta, np.diag(M))) - float(np.dot(gamma, Bt))
    return value, g.dlog_theta + np.diag(M), g.dlog_gamma - Bt


def grad_neg_avg_log_lik(theta, gamma, O, stats: SufficientStats, **quad):
    M, Bt = stats.rotated(np.asarray(O, dtype=float))
    _, g_theta, g_gamma = _value_and_grad(
        np.asarray(theta, dtype=float), np.asarray(gamma, dtype=float), M, Bt, quad
    )
    return g_theta, g_gamma


def frame_direction(theta, gamma, O, stats: SufficientStats) -> np.ndarray:
    """Skew-symmetric steepest-descent direction ``vhat`` for ``O -> expm(vhat t) O``.

    ``S = diag(theta) M - M diag(theta) - gamma (O B)'``; the frame is
    stationary exactly when ``S`` is symmetric, and ``vhat = S' - S``.  Along
    it the objective's initial slope is ``-|vhat|_F**2 / 2``.
    """
    M, Bt = stats.rotated(np.asarray(O, dtype=float))
    theta = np.asarray(theta, dtype=float)
    S = theta[:, None] * M - M * theta[None, :] - np.outer(gamma, Bt)
    return S.T - S


def _frame_objective_part(theta, gamma, O, stats):
    M, Bt = stats.rotated(O)
    return float(np.dot(theta, np.diag(M)) - np.dot(gamma, Bt))


def _reorthogonalize(O):
    if np.max(np.abs(O.T @ O - np.eye(O.shape[0]))) > 1e-10:
        u, _, vt = np.linalg.svd(O)
        return u @ vt
    return O


def frame_update(theta, gamma, O, stats: SufficientStats, *, step=1.0, shrink=0.5, armijo=1e-4, min_step=1e-20):
    """One backtracking step along ``expm(vhat t) O``; returns ``(O_new, |vhat|_F, t)``.

    ``t == 0`` (and ``O_new is O``) when no decrease was found.
    """
    O = np.asarray(O, dtype=float)
    theta = np.asarray(theta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    vhat = frame_direction(theta, gamma, O, stats)
    norm = float(np.linalg.norm(vhat))
    if norm == 0.0:
        return O, 0.0, 0.0
    f0 = _frame_objective_part(theta, gamma, O, stats)
    slope = -0.5 * norm * norm
    t = step
    while t >= min_step:
        O_new = _reorthogonalize(expm(vhat * t) @ O)
        f1 = _frame_objective_part(theta, gamma, O_new, stats)
        if f1 < f0 and f1 <= f0 + armijo * t * slope:
            return O_new, norm, t
        t *= shrink
    return O, norm, 0.0


class _Objective:
    """Caches the last gradient evaluation; trial points only need values."""

    def __init__(self, stats, quad):
        self.stats = stats
        self.quad = quad
        self.M = None
        self.Bt = None

    def set_frame(self, O):
        self.M, self.Bt = self.stats.rotated(O)

    def value(self, theta, gamma):
        try:
            log_c = norm_const(CanonicalParams(theta, gamma), **self.quad).log_value
        except (AccuracyError, NumericalDomainError, FloatingPointError):
            return math.inf
        return log_c + float(np.dot(theta, np.diag(self.M))) - float(np.dot(gamma, self.Bt))

    def value_and_grad(self, theta, gamma):
        value, g_theta, g_gamma = _value_and_grad(theta, gamma, self.M, self.Bt, self.quad)
        # exact gauge direction: the objective is flat along theta + c
        return value, g_theta - np.mean(g_theta), g_gamma


def _backtrack(f, f0, slope, step, shrink, armijo, min_step):
    """Largest ``step * shrink**k`` meeting strict decrease and Armijo; ``(t, value)`` or ``(0, f0)``."""
    t = step
    while t >= min_step:
        value = f(t)
        if value < f0 and value <= f0 + armijo * t * slope:
            return t, value
        t *= shrink
    return 0.0, f0


def _bb_step(s, y, fallback):
    sy = float(np.dot(s, y))
    if sy > 0:
        return float(np.dot(s, s)) / sy
    return fallback


def fit(stats: SufficientStats, config: FitConfig = FitConfig()) -> FitResult:
    """Alternate theta, gamma (and optionally frame) descent steps until the gradient is small."""
    p = stats.p
    theta = np.zeros(p) if config.init_theta is None else np.array(config.init_theta, dtype=float)
    gamma = np.zeros(p) if config.init_gamma is None else np.array(config.init_gamma, dtype=float)
    O = np.eye(p) if config.init_O is None else np.array(config.init_O, dtype=float)
    if theta.shape != (p,) or gamma.shape != (p,) or O.shape != (p, p):
        raise ValueError(f"initial values do not match dimension p={p}")
    if np.max(np.abs(O.T @ O - np.eye(p))) > 1e-8:
        raise ValueError("init_O is not orthogonal")

    obj = _Objective(stats, config.quad_kwargs)
    obj.set_frame(O)
    value, g_theta, g_gamma = obj.value_and_grad(theta, gamma)
    trace = [value]
    state = {"theta": theta, "gamma": gamma, "O": O, "vhat": 0.0, "grad": math.inf}

    def result(iterations, converged):
        return FitResult(
            theta_hat=gauge_align(state["theta"]),
            gamma_hat=state["gamma"].copy(),
            O_hat=state["O"].copy(),
            objective_trace=list(trace),
            iterations=iterations,
            converged=converged,
            final_grad_norm=state["grad"],
            theta_raw=state["theta"].copy(),
            vhat_norm=state["vhat"],
        )

    def stagnate(iteration, what):
        raise StagnationError(
            f"line search on {what} found no decrease at iteration {iteration} "
            f"(gradient sup-norm {state['grad']:.3g})",
            result=result(iteration, False),
        )

    step_theta = step_gamma = step_joint = config.initial_step
    step_frame = config.initial_step
    memory = deque(maxlen=config.memory)
    bt = dict(shrink=config.shrink, armijo=config.armijo, min_step=config.min_step)

    for iteration in range(config.max_iter):
        if config.optimize_frame:
            state["vhat"] = float(np.linalg.norm(frame_direction(theta, gamma, O, stats)))
        state["grad"] = float(max(np.max(np.abs(g_theta)), np.max(np.abs(g_gamma))))
        if state["grad"] < config.grad_tol and (
            not config.optimize_frame or state["vhat"] < config.grad_tol
        ):
            return result(iteration, True)

        if config.optimizer == "gradient_descent":
            # theta block
            gn = float(np.dot(g_theta, g_theta))
            if gn > 0:
                t, new_value = _backtrack(
                    lambda a: obj.value(theta - a * g_theta, gamma), value, -gn, step_theta, **bt
                )
                if t == 0.0:
                    stagnate(iteration, "theta")
                theta_new = theta - t * g_theta
                value = new_value
                trace.append(value)
                value, g_theta_new, g_gamma = obj.value_and_grad(theta_new, gamma)
                step_theta = min(_bb_step(theta_new - theta, g_theta_new - g_theta, 2 * t), 1e8)
                theta, g_theta = theta_new, g_theta_new
                state["theta"] = theta
            # gamma block at the updated theta
            gn = float(np.dot(g_gamma, g_gamma))
            if gn > 0:
                t, new_value = _backtrack(
                    lambda a: obj.value(theta, gamma - a * g_gamma), value, -gn, step_gamma, **bt
                )
                if t == 0.0:
                    stagnate(iteration, "gamma")
                gamma_new = gamma - t * g_gamma
                trace.append(new_value)
                value, g_theta, g_gamma_new = obj.value_and_grad(theta, gamma_new)
                step_gamma = min(_bb_step(gamma_new - gamma, g_gamma_new - g_gamma, 2 * t), 1e8)
                gamma, g_gamma = gamma_new, g_gamma_new
                state["gamma"] = gamma
        else:
            x = np.concatenate([theta, gamma])
            g = np.concatenate([g_theta, g_gamma])
            direction = -_two_loop(g, memory)
            slope = float(np.dot(g, direction))
            if not slope < 0:
                memory.clear()
                direction = -g
                slope = -float(np.dot(g, g))
            first = 1.0 if memory else min(step_joint, 1.0 / max(1e-12, math.sqrt(-slope)))
            t, new_value = _backtrack(
                lambda a: obj.value(*np.split(x + a * direction, 2)), value, slope, first, **bt
            )
            if t == 0.0:
                if memory:
                    memory.clear()
                    continue
                stagnate(iteration, "theta/gamma")
            x_new = x + t * direction
            theta, gamma = np.split(x_new, 2)
            trace.append(new_value)
            value, g_theta, g_gamma = obj.value_and_grad(theta, gamma)
            g_new = np.concatenate([g_theta, g_gamma])
            s, y = x_new - x, g_new - g
            if float(np.dot(s, y)) > 1e-12 * float(np.linalg.norm(s) * np.linalg.norm(y)):
                memory.append((s, y))
            step_joint = 2 * t
            state["theta"], state["gamma"] = theta, gamma

        if config.optimize_frame:
            O_new, vnorm, t = frame_update(theta, gamma, O, stats, step=step_frame, **bt)
            if t > 0:
                O = O_new
                obj.set_frame(O)
                value, g_theta, g_gamma = obj.value_and_grad(theta, gamma)
                trace.append(value)
                step_frame = min(2 * t, 1e6)
                state["O"] = O
                memory.clear()
            elif vnorm >= config.grad_tol:
                log.debug("frame step found no decrease at iteration %d", iteration)

        if iteration % 500 == 0:
            log.debug("iteration %d: objective %.12g, grad %.3g", iteration, value, state["grad"])

    state["grad"] = float(max(np.max(np.abs(g_theta)), np.max(np.abs(g_gamma))))
    return result(config.max_iter, False)


def _two_loop(g, memory):
    """L-BFGS product ``H g`` from the stored ``(s, y)`` pairs."""
    q = g.copy()
    if not memory:
        return q
    alphas = []
    for s, y in reversed(memory):
        rho = 1.0 / float(np.dot(y, s))
        a = rho * float(np.dot(s, q))
        alphas.append((rho, a))
        q -= a * y
    s, y = memory[-1]
    q *= float(np.dot(s, y)) / float(np.dot(y, y))
    for (s, y), (rho, a) in zip(memory, reversed(alphas)):
        b = rho * float(np.dot(y, q))
        q += (a - b) * s
    return q
