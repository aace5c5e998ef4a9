"""Tests for the dyadic families and block decomposition."""
import math

import numpy as np
import pytest

from mixtrace.errors import GridMismatchError, ResolutionError
from mixtrace.grid_field import certify, fourier_multiplier
from mixtrace.littlewood_paley import (
    build_family,
    covering_index,
    decompose,
    lp_symbol,
    nyquist_radius,
    psi,
    recompose,
    smooth_step,
)
from mixtrace.models import AnisotropyVector, Grid, GridField


def _random_field(grid, rng):
    return GridField(grid=grid, values=rng.standard_normal(grid.points) + 1j * rng.standard_normal(grid.points))


def test_smooth_step_limits():
    assert smooth_step(-1.0) == 0.0
    assert smooth_step(0.0) == 0.0
    assert smooth_step(1.0) == 1.0
    assert smooth_step(2.0) == 1.0
    assert smooth_step(0.5) == pytest.approx(0.5)


def test_psi_plateau_and_cutoff():
    t = np.array([0.0, 1.0, 1.1, 1.2, 1.3, 2.0])
    values = psi(t)
    assert values[0] == values[1] == values[2] == 1.0
    assert 0.0 < values[3] < 1.0
    assert values[4] == values[5] == 0.0
    assert np.all(np.diff(psi(np.linspace(1.0, 1.4, 200))) <= 0.0)


def test_nyquist_family_index():
    grid = Grid.cube(2, 2 * math.pi, 64)
    fam = build_family(AnisotropyVector.isotropic(2), grid)
    assert nyquist_radius(grid, AnisotropyVector.isotropic(2)) == pytest.approx(16.0)
    assert fam.j_max == 3
    assert list(fam.indices) == [0, 1, 2, 3]


def test_coarse_grid_is_rejected(lp_grid, aniso):
    # Nyquist radius 16^(2/3) leaves J_max = 1
    with pytest.raises(ResolutionError):
        build_family(aniso, lp_grid)


def test_explicit_window_overrides_nyquist(lp_grid, aniso):
    fam = build_family(aniso, lp_grid, j_max=2)
    assert fam.j_max == 2


def test_corona_bounds(lp_grid):
    fam = build_family(AnisotropyVector.isotropic(2), lp_grid)
    assert fam.corona(0) == (0.0, pytest.approx(1.3))
    inner, outer = fam.corona(2)
    assert inner == pytest.approx(2.2)
    assert outer == pytest.approx(5.2)


def test_covering_index():
    assert covering_index(1.0) == 0
    assert covering_index(1.1) == 0
    assert covering_index(2.2) == 1
    assert covering_index(4.5) == 3


def test_blocks_telescope_to_last_psi(lp_grid):
    fam = build_family(AnisotropyVector.isotropic(2), lp_grid)
    total = sum(fam.block_symbol(j) for j in fam.indices)
    assert np.allclose(total, fam.Psi(fam.j_max), atol=1e-14)
    assert np.all(fam.block_symbol(1) >= -1e-15)


def test_homogeneous_window_covers_nonzero_frequencies(torus_grid):
    fam = build_family(AnisotropyVector(a=(1.0, 2.0)), torus_grid, flavor="homogeneous")
    total = sum(fam.block_symbol(k) for k in fam.indices)
    assert total.flat[0] == pytest.approx(0.0, abs=1e-14)
    rest = np.delete(total.ravel(), 0)
    assert np.allclose(rest, 1.0, atol=1e-14)


def test_lp_symbol_matches_grid_blocks(lp_grid):
    a = AnisotropyVector.isotropic(2)
    fam = build_family(a, lp_grid)
    xi = np.stack([np.asarray(m) for m in np.meshgrid(lp_grid.axis_frequencies(1), lp_grid.axis_frequencies(2), indexing="ij")])
    for j in fam.indices:
        assert np.allclose(lp_symbol(a, j, xi), fam.block_symbol(j), atol=1e-14)


def test_decompose_recompose(lp_grid, rng):
    u = _random_field(lp_grid, rng)
    fam = build_family(AnisotropyVector.isotropic(2), lp_grid)
    d = decompose(u, fam)
    assert len(d.blocks) == 4
    assert np.allclose(recompose(d).values, u.values, atol=1e-12)


def test_partial_recompose_is_psi_multiplier(lp_grid, rng):
    u = _random_field(lp_grid, rng)
    fam = build_family(AnisotropyVector.isotropic(2), lp_grid)
    partial = recompose(decompose(u, fam), upto=1)
    expected = fourier_multiplier(fam.Psi(1), u)
    assert np.allclose(partial.values, expected.values, atol=1e-12)


def test_blocks_carry_honest_certificates(lp_grid, rng):
    u = _random_field(lp_grid, rng)
    fam = build_family(AnisotropyVector(a=(1.0, 1.5)), lp_grid, j_max=1)
    for block in decompose(u, fam).blocks:
        assert certify(block, threshold=1e-9)


def test_decompose_rejects_other_grid(lp_grid, torus_grid, rng):
    fam = build_family(AnisotropyVector.isotropic(2), lp_grid)
    with pytest.raises(GridMismatchError):
        decompose(_random_field(torus_grid, rng), fam)
