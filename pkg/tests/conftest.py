"""Shared fixtures and the acceptance summary printed at the end of a run."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from spinscape.mixture import make_mixture, parse_mixture

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    """Store one acceptance line; printed in the terminal summary."""
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def same_slope_mixture(n1: float, t: float) -> "Mixture":  # noqa: F821
    """Mixture on degrees 2, 3, 5 with first derivative ``n1``; ``t`` moves the second."""
    w5 = t
    w3 = n1 - 2.0 - 3.0 * w5
    w2 = 1.0 - w3 - w5
    return make_mixture([(2, w2), (3, w3), (5, w5)])


@pytest.fixture
def pure3():
    return parse_mixture("3:1.0")


@pytest.fixture
def pure2():
    return parse_mixture("2:1.0")


@pytest.fixture
def full():
    return parse_mixture("2:0.9,10:0.1")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
