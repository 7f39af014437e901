import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fbnorm import (
    AccuracyError,
    CanonicalParams,
    ParameterDomainError,
    derive_quadrature,
    log_norm_const_grad,
    moments,
    norm_const,
    norm_const_grad,
)
from fbnorm.normconst import resolve_quadrature
from fbnorm.params import sphere_area
from fbnorm.tables import TABLE1, TABLE3

D1 = derive_quadrature(200, 1.0, 2.0, 1.0)


@pytest.mark.parametrize(
    "theta, expected",
    [
        ((0, 1, 2, 5), TABLE1[5][0]),
        ((0, 1, 2, 100), TABLE1[100][0]),
        ((0, 1, 2, 10, 10), TABLE1[10][1]),
        ((0, 1, 22, 30), TABLE3[30][0]),
        ((0, 1, 22, 200, 200), TABLE3[200][1]),
    ],
)
def test_published_values(theta, expected):
    assert norm_const(CanonicalParams(theta, np.zeros(len(theta))), D1).value == pytest.approx(expected, abs=1e-6)


def test_uniform_s2():
    assert norm_const(CanonicalParams(np.zeros(3), np.zeros(3))).value == pytest.approx(4 * math.pi, rel=1e-12)


@pytest.mark.parametrize("p", range(2, 21))
def test_uniform_any_dimension(p):
    assert norm_const(CanonicalParams(np.zeros(p), np.zeros(p))).value == pytest.approx(sphere_area(p), rel=1e-10)


@pytest.mark.filterwarnings("ignore:saddle distance")
@pytest.mark.parametrize("kappa", [0.5, 1.0, 5.0, 20.0, 60.0])
def test_von_mises_fisher(kappa):
    value = norm_const(CanonicalParams(np.zeros(3), [0.0, 0.0, kappa])).value
    assert value == pytest.approx(4 * math.pi * math.sinh(kappa) / kappa, rel=1e-10)


def test_circle_bingham_closed_form():
    # on S^1: integral of exp(-theta x2^2) = 2 pi exp(-theta/2) I0(theta/2)
    from scipy.special import ive

    theta = 3.0
    value = norm_const(CanonicalParams([0.0, theta], [0.0, 0.0])).value
    assert value == pytest.approx(2 * math.pi * ive(0, theta / 2), rel=1e-12)


def test_large_shift_stays_finite_in_log():
    res = norm_const(CanonicalParams([-800.0, -799.0, -798.0], [0.0, 0.0, 0.0]))
    assert res.value is None
    ref = norm_const(CanonicalParams([0.0, 1.0, 2.0], [0.0, 0.0, 0.0]))
    assert res.log_value == pytest.approx(ref.log_value + 800.0, rel=1e-14)


def test_gate_raises_when_contour_too_far_for_grid():
    params = CanonicalParams(np.zeros(3), np.zeros(3))
    with pytest.raises(AccuracyError):
        norm_const(params, derive_quadrature(8, 1.0, 2.0, 0.1))
    res = norm_const(params, derive_quadrature(8, 1.0, 2.0, 0.1), check=False)
    assert res.imag_residual >= 1e-8


def test_sphere_needs_two_dimensions():
    with pytest.raises(ParameterDomainError):
        norm_const(CanonicalParams([0.0], [1.0]))


@given(st.integers(2, 8), st.integers(0, 100_000))
def test_gradient_identities(p, seed):
    rng = np.random.default_rng(seed)
    gamma = rng.normal(0, 2, p)
    gamma[0] = 0.0
    params = CanonicalParams(rng.uniform(-3, 8, p), gamma)
    dtheta, dgamma = norm_const_grad(params)
    c = norm_const(params).value
    assert np.sum(dtheta) == pytest.approx(-c, rel=1e-10)
    assert dgamma[0] == 0.0
    assert np.all(dtheta < 0)


@given(st.integers(2, 6), st.integers(0, 100_000))
def test_gradient_matches_finite_differences(p, seed):
    rng = np.random.default_rng(seed)
    params = CanonicalParams(rng.uniform(0, 6, p), rng.normal(0, 2, p))
    quad = resolve_quadrature(params)
    g = log_norm_const_grad(params, quad)
    step = 1e-5
    i = int(rng.integers(p))
    e = np.zeros(p)
    e[i] = step
    lc = lambda th, ga: norm_const(CanonicalParams(th, ga), quad).log_value
    fd_t = (lc(params.theta + e, params.gamma) - lc(params.theta - e, params.gamma)) / (2 * step)
    fd_g = (lc(params.theta, params.gamma + e) - lc(params.theta, params.gamma - e)) / (2 * step)
    assert g.dlog_theta[i] == pytest.approx(fd_t, rel=1e-6, abs=1e-8)
    assert g.dlog_gamma[i] == pytest.approx(fd_g, rel=1e-6, abs=1e-8)


def test_moments_of_uniform():
    mean, second = moments(CanonicalParams(np.zeros(4), np.zeros(4)))
    np.testing.assert_allclose(mean, 0.0, atol=1e-14)
    np.testing.assert_allclose(second, 0.25, rtol=1e-10)


@given(st.integers(2, 7), st.integers(0, 100_000), st.floats(-20, 20))
def test_shift_sign_and_permutation(p, seed, c):
    rng = np.random.default_rng(seed)
    params = CanonicalParams(rng.uniform(0, 10, p), rng.normal(0, 2, p))
    base = norm_const(params)
    shifted = norm_const(CanonicalParams(params.theta + c, params.gamma))
    assert shifted.log_value + c == pytest.approx(base.log_value, abs=1e-12 * (1 + abs(c)))
    flipped = norm_const(CanonicalParams(params.theta, -params.gamma))
    assert flipped.value == base.value
    perm = rng.permutation(p)
    permuted = norm_const(CanonicalParams(params.theta[perm], params.gamma[perm]))
    assert permuted.value == pytest.approx(base.value, rel=1e-12)


def test_result_serializes():
    d = norm_const(CanonicalParams([0, 1], [1, 0])).to_dict()
    assert set(d) == {"log_value", "value", "imag_residual", "quadrature", "t0"}
