"""Tests for directional, iterated and Peetre maximal functions."""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from mixtrace.errors import DomainError
from mixtrace.maximal import default_radii, directional_maximal, iterated_maximal, peetre_maximal
from mixtrace.models import Grid, GridField, MaximalParams


@pytest.fixture
def line():
    return Grid.cube(1, math.pi, 32)


def _spike(grid, index):
    values = np.zeros(grid.points)
    values[index] = 1.0
    return GridField(grid=grid, values=values)


def test_default_radii(line):
    delta = line.spacing[0]
    assert default_radii(line, 1) == tuple(delta * m for m in (1, 2, 4, 8, 16))


def test_constant_is_fixed(torus_grid):
    u = GridField(grid=torus_grid, values=np.full(torus_grid.points, -2.0))
    assert np.allclose(directional_maximal(u, 2).values, 2.0)
    assert np.allclose(iterated_maximal(u, MaximalParams(t=(0.5, 1.0))).values, 2.0)
    assert np.allclose(peetre_maximal(u, MaximalParams(t=(1.0, 1.0))).values, 2.0)


def test_directional_maximal_of_spike(line):
    m = directional_maximal(_spike(line, 10), 1).values.real
    assert m[10] == pytest.approx(1.0 / 3.0)
    assert m[12] == pytest.approx(1.0 / 5.0)
    assert m[13] == pytest.approx(1.0 / 9.0)
    assert m[7] == pytest.approx(1.0 / 9.0)


def test_directional_maximal_wraps(line):
    m = directional_maximal(_spike(line, 0), 1).values.real
    assert m[31] == pytest.approx(1.0 / 3.0)


def test_directional_axis_check(torus_grid):
    u = GridField(grid=torus_grid, values=np.ones(torus_grid.points))
    with pytest.raises(DomainError):
        directional_maximal(u, 3)


def test_iterated_one_axis_is_directional(line, rng):
    u = GridField(grid=line, values=rng.standard_normal(line.points))
    it = iterated_maximal(u, MaximalParams(t=(1.0,)))
    assert np.allclose(it.values, directional_maximal(u, 1).values)


def test_iterated_dimension_check(torus_grid):
    u = GridField(grid=torus_grid, values=np.ones(torus_grid.points))
    with pytest.raises(DomainError):
        iterated_maximal(u, MaximalParams(t=(1.0,)))


def test_peetre_dominates_modulus(torus_grid, rng):
    u = GridField(grid=torus_grid, values=rng.standard_normal(torus_grid.points))
    star = peetre_maximal(u, MaximalParams(t=(1.0, 2.0), b=(1.0, 3.0)))
    assert np.all(star.values.real >= np.abs(u.values) - 1e-15)


def test_peetre_of_spike(line):
    star = peetre_maximal(_spike(line, 10), MaximalParams(t=(1.0,), b=(2.0,))).values.real
    delta = line.spacing[0]
    assert star[10] == pytest.approx(1.0)
    assert star[13] == pytest.approx(1.0 / (1.0 + 2.0 * 3 * delta))


def test_maximal_params_validation():
    with pytest.raises(ValidationError):
        MaximalParams(t=(0.0, 1.0))
    with pytest.raises(ValidationError):
        MaximalParams(t=(1.0, 1.0), b=(1.0,))
    with pytest.raises(ValidationError):
        MaximalParams(t=(1.0,), radii=((),))
