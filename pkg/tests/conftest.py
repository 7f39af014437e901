import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fbnorm import CanonicalParams

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split(".")[0]), len(k), k)):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def record():
    def _record(key, passed, detail):
        ACCEPTANCE[key] = (bool(passed), detail)
        return bool(passed)

    return _record


def random_params(rng, p, theta_scale=5.0, gamma_scale=2.0):
    return CanonicalParams(rng.uniform(0, theta_scale, p), rng.normal(0, gamma_scale, p))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
