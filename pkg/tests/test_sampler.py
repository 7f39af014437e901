import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fbnorm import CanonicalParams, LowAcceptanceError, ParameterDomainError, moments, sample_fb, sample_uniform_sphere
from fbnorm.sampler import envelope_bound, simple_bound


def test_uniform_sphere_rows_and_moments():
    batch = sample_uniform_sphere(3, 200_000, seed=5)
    assert batch.X.shape == (200_000, 3)
    assert batch.acceptance_rate == 1.0
    np.testing.assert_allclose(np.linalg.norm(batch.X, axis=1), 1.0, atol=1e-14)
    np.testing.assert_allclose(batch.X.mean(axis=0), 0.0, atol=0.01)
    np.testing.assert_allclose((batch.X**2).mean(axis=0), 1 / 3, atol=0.01)


def test_zero_parameters_accept_everything():
    batch = sample_fb(CanonicalParams(np.zeros(3), np.zeros(3)), 100, seed=1)
    assert batch.acceptance_rate == 1.0
    assert batch.proposals == 100


def test_deterministic_given_seed():
    params = CanonicalParams([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    a = sample_fb(params, 1000, seed=42)
    b = sample_fb(params, 1000, seed=42)
    np.testing.assert_array_equal(a.X, b.X)
    assert a.acceptance_rate == b.acceptance_rate
    assert not np.array_equal(a.X, sample_fb(params, 1000, seed=43).X)


def test_prefix_property():
    params = CanonicalParams([0.0, 1.0], [1.0, 0.5])
    np.testing.assert_array_equal(sample_fb(params, 300, seed=7).X, sample_fb(params, 900, seed=7).X[:300])


def test_thread_count_does_not_change_output(monkeypatch):
    params = CanonicalParams([0.0, 4.0, 8.0], [3.0, 1.0, 0.0])
    monkeypatch.setenv("FBNORM_THREADS", "1")
    serial = sample_fb(params, 50_000, seed=11).X
    monkeypatch.setenv("FBNORM_THREADS", "4")
    np.testing.assert_array_equal(sample_fb(params, 50_000, seed=11).X, serial)


@given(st.integers(2, 6), st.integers(0, 10_000))
def test_envelope_bounds_the_exponent(p, seed):
    rng = np.random.default_rng(seed)
    params = CanonicalParams(rng.uniform(-2, 6, p), rng.normal(0, 3, p))
    x = sample_uniform_sphere(p, 5000, seed=seed).X
    tight = envelope_bound(params)
    assert np.max(params.exponent(x)) <= tight
    assert tight <= simple_bound(params) + 1e-12


def test_tight_envelope_is_attained():
    params = CanonicalParams([0.0, 1.0], [0.0, 3.0])
    angles = np.linspace(0, 2 * np.pi, 200_001)
    x = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    assert envelope_bound(params) == pytest.approx(np.max(params.exponent(x)), abs=1e-9)


def test_simple_envelope_matches_formula():
    params = CanonicalParams([1.0, 2.0, 3.0], [1.0, 2.0, 2.0])
    assert envelope_bound(params, tight=False) == pytest.approx(-1.0 + 3.0)


def test_moments_against_quadrature():
    params = CanonicalParams([0.0, 2.0, 5.0], [1.0, -2.0, 0.5])
    n = 200_000
    X = sample_fb(params, n, seed=3).X
    mean, second = moments(params)
    for emp, exact in ((X, mean), (X**2, second)):
        se = emp.std(axis=0, ddof=1) / math.sqrt(n)
        assert np.all(np.abs(emp.mean(axis=0) - exact) < 4 * se)


def test_low_acceptance_reports_rate():
    params = CanonicalParams(np.zeros(6), np.full(6, 10.0))
    with pytest.raises(LowAcceptanceError) as info:
        sample_fb(params, 100_000, seed=0, max_tries=70_000, tight=False)
    assert 0 < info.value.rate < 1
    assert "max_tries" in str(info.value)


def test_invalid_requests():
    with pytest.raises(ParameterDomainError):
        sample_uniform_sphere(1, 5)
    with pytest.raises(ParameterDomainError):
        sample_fb(CanonicalParams([0.0, 1.0], [0.0, 0.0]), 0)
