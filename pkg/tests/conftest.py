"""Pytest fixtures for mixtrace tests."""
import math

import numpy as np
import pytest

from mixtrace.models import AnisotropyVector, Grid
from mixtrace.observability import reset_metrics
from mixtrace.resilience import clear_report_cache


@pytest.fixture(autouse=True)
def fresh_state():
    """Suite report cache and metrics start empty in every test."""
    clear_report_cache()
    reset_metrics()
    yield
    clear_report_cache()


@pytest.fixture
def torus_grid():
    """2-D grid on [-pi, pi)^2 with 32 points per axis: integer frequencies, Nyquist 16."""
    return Grid.cube(2, math.pi, 32)


@pytest.fixture
def lp_grid():
    """2-D grid on [-2pi, 2pi)^2 with 64 points per axis: frequency step 1/2, Nyquist 16."""
    return Grid.cube(2, 2 * math.pi, 64)


@pytest.fixture
def aniso():
    return AnisotropyVector(a=(1.0, 1.5))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
