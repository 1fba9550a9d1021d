import numpy as np
import pytest
from hypothesis import settings, strategies as st

from twostage.model import ModelParams

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def finite_params(draw, max_servers=120, max_capacity=50):
    lam = draw(st.floats(1.0, 100.0))
    mu = draw(st.floats(0.5, 2.0))
    s = draw(st.integers(1, max_servers))
    n1 = draw(st.integers(0, max_capacity))
    n2 = draw(st.integers(0, max_capacity))
    theta1 = draw(st.floats(0.1, 20.0))
    theta2 = draw(st.floats(0.1, 20.0))
    return ModelParams(lam, mu, s, n1, n2, theta1, theta2)


def random_finite_grid(n, seed=20240601):
    """Reproducible random parameter sets over the acceptance ranges."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        out.append(ModelParams(
            float(rng.uniform(1, 100)), float(rng.uniform(0.5, 2)), int(rng.integers(1, 121)),
            int(rng.integers(0, 51)), int(rng.integers(0, 51)),
            float(rng.uniform(0.1, 20)), float(rng.uniform(0.1, 20))))
    return out


@pytest.fixture
def table2_point():
    return ModelParams(50.0, 1.0, 40, 10, 20, 2.0, 2.0)


# -- acceptance report -------------------------------------------------------------

ACCEPTANCE = {}


def record_criterion(number, passed, detail):
    """Remember one acceptance verdict; the terminal summary prints them in order."""
    ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    print(ACCEPTANCE[number])
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
