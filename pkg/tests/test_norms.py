"""Tests for mixed Lebesgue norms, F/B quasi-norms, Sobolev norms, the lift and the Hardy inequalities."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixtrace.errors import DomainError, UnsupportedError, WindowError
from mixtrace.grid_field import sample
from mixtrace.littlewood_paley import build_family
from mixtrace.models import AnisotropyVector, ExponentVector, Grid, GridField, SpaceParams
from mixtrace.norms import (
    hardy_constant,
    hardy_smoothing,
    lift,
    lq,
    mixed_lp_lq_norm,
    mixed_lp_norm,
    sobolev_norm,
    space_quasi_norm,
    symbol_homogeneous_besov_norm,
)
from mixtrace.suites.ensembles import band_limited, rng_for

ISO = AnisotropyVector.isotropic(2)


def _params(s, p, q=2.0, scale="F", a=ISO):
    return SpaceParams(s=s, a=a, p=ExponentVector(p=p), q=q, scale=scale)


def test_constant_field_norms(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.ones_like(x1))
    assert mixed_lp_norm(u, ExponentVector(p=(2.0, 2.0))) == pytest.approx(2 * math.pi)
    assert mixed_lp_norm(u, ExponentVector(p=(math.inf, math.inf))) == pytest.approx(1.0)
    assert mixed_lp_norm(u, ExponentVector(p=(1.0, math.inf))) == pytest.approx(2 * math.pi)


def test_mixed_norm_factorizes_on_tensors(torus_grid):
    u = sample(torus_grid, lambda x1, x2: (2.0 + np.cos(x1)) * (1.5 + np.sin(2 * x2)))
    g = GridField(grid=torus_grid.restricted(2), values=2.0 + np.cos(torus_grid.axis_nodes(1)))
    h = GridField(grid=torus_grid.restricted(1), values=1.5 + np.sin(2 * torus_grid.axis_nodes(2)))
    expected = mixed_lp_norm(g, ExponentVector(p=(1.0,))) * mixed_lp_norm(h, ExponentVector(p=(3.0,)))
    assert mixed_lp_norm(u, ExponentVector(p=(1.0, 3.0))) == pytest.approx(expected, rel=1e-12)


def test_mixed_norm_dimension_check(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.ones_like(x1))
    with pytest.raises(DomainError):
        mixed_lp_norm(u, ExponentVector(p=(2.0,)))


def test_lp_lq_single_member_is_lp(torus_grid, rng):
    u = GridField(grid=torus_grid, values=rng.standard_normal(torus_grid.points))
    p = ExponentVector(p=(1.5, 3.0))
    assert mixed_lp_lq_norm([u], p, 2.0) == pytest.approx(mixed_lp_norm(u, p), rel=1e-12)
    assert mixed_lp_lq_norm([], p, 2.0) == 0.0


def test_lp_lq_sup_is_pointwise_max(torus_grid, rng):
    u = GridField(grid=torus_grid, values=rng.standard_normal(torus_grid.points))
    v = GridField(grid=torus_grid, values=rng.standard_normal(torus_grid.points))
    p = ExponentVector(p=(2.0, 2.0))
    top = GridField(grid=torus_grid, values=np.maximum(np.abs(u.values), np.abs(v.values)))
    assert mixed_lp_lq_norm([u, v], p, math.inf) == pytest.approx(mixed_lp_norm(top, p), rel=1e-12)


def test_lq():
    assert lq([3.0, 4.0], 2.0) == pytest.approx(5.0)
    assert lq([3.0, -4.0], math.inf) == 4.0
    assert lq([1.0, 1.0], 0.5) == pytest.approx(4.0)
    assert lq([], 1.0) == 0.0


def test_single_block_mode_norm(lp_grid):
    # |xi| = 3 sits where Phi_2 = 1 and every other block vanishes
    u = sample(lp_grid, lambda x1, x2: np.exp(3j * x1))
    fam = build_family(ISO, lp_grid)
    for scale in ("F", "B"):
        report = space_quasi_norm(u, _params(1.0, (2.0, 2.0), scale=scale), fam)
        assert report.value == pytest.approx(4.0 * 4.0 * math.pi, rel=1e-10)
        assert report.tail_ok
        assert report.remainder_ratio < 1e-12


def test_space_norm_rejects_bad_inputs(lp_grid):
    u = sample(lp_grid, lambda x1, x2: np.exp(1j * x1))
    fam = build_family(ISO, lp_grid)
    with pytest.raises(UnsupportedError):
        space_quasi_norm(u, _params(2.0, (2.0, 2.0), scale="W"), fam)
    with pytest.raises(UnsupportedError):
        space_quasi_norm(u, _params(0.0, (2.0, math.inf)), fam)
    with pytest.raises(DomainError):
        space_quasi_norm(u, _params(0.0, (2.0, 2.0), a=AnisotropyVector(a=(1.0, 2.0))), fam)


def test_sobolev_w_norm_of_mode(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.exp(3j * x1))
    # orders (2, 2): ||u|| + ||d_1^2 u|| + ||d_2^2 u|| = 2pi (1 + 9 + 0)
    assert sobolev_norm(u, _params(2.0, (2.0, 2.0), scale="W")) == pytest.approx(20 * math.pi, rel=1e-10)


def test_bessel_potential_norm_of_mode(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.exp(3j * x1))
    value = sobolev_norm(u, _params(1.0, (2.0, 2.0), scale="H"))
    assert value == pytest.approx(math.sqrt(10.0) * 2 * math.pi, rel=1e-10)
    with pytest.raises(UnsupportedError):
        sobolev_norm(u, _params(1.0, (2.0, 2.0)))


def test_lift_inverse(torus_grid, rng):
    u = GridField(grid=torus_grid, values=rng.standard_normal(torus_grid.points))
    a = AnisotropyVector(a=(1.0, 1.5))
    back = lift(lift(u, 1.5, a), -1.5, a)
    assert np.allclose(back.values, u.values, atol=1e-10)
    assert lift(u, 0, a) is u


def test_symbol_norm_needs_homogeneous_family(torus_grid):
    b = sample(torus_grid, lambda x1, x2: np.cos(x1))
    with pytest.raises(DomainError):
        symbol_homogeneous_besov_norm(b, 1.0, 1.0, 1.0, build_family(ISO, torus_grid))


def test_symbol_norm_of_zero(torus_grid):
    fam = build_family(ISO, torus_grid, flavor="homogeneous")
    b = GridField(grid=torus_grid, values=np.zeros(torus_grid.points))
    assert symbol_homogeneous_besov_norm(b, 1.0, 1.0, 1.0, fam) == 0.0


def test_symbol_norm_rejects_unresolved_symbol(torus_grid):
    fam = build_family(ISO, torus_grid, flavor="homogeneous")
    b = sample(torus_grid, lambda x1, x2: np.cos(15 * x1))
    with pytest.raises(WindowError):
        symbol_homogeneous_besov_norm(b, 1.0, 1.0, 1.0, fam)


def test_symbol_norm_rejects_divergent_low_tail(torus_grid):
    fam = build_family(ISO, torus_grid, flavor="homogeneous")
    b = sample(torus_grid, lambda x1, x2: np.ones_like(x1))
    with pytest.raises(WindowError):
        symbol_homogeneous_besov_norm(b, -2.0, 2.0, 1.0, fam)


def test_symbol_norm_without_mean_is_window_sum(torus_grid):
    fam = build_family(ISO, torus_grid, flavor="homogeneous")
    b = sample(torus_grid, lambda x1, x2: np.cos(2 * x1))
    with_tail = symbol_homogeneous_besov_norm(b, 1.0, 1.0, 1.0, fam)
    without = symbol_homogeneous_besov_norm(b, 1.0, 1.0, 1.0, fam, low_tail=False)
    assert with_tail == pytest.approx(without)
    assert with_tail > 0


def test_hardy_constant_value():
    assert hardy_constant(1.0, 1.0, 1.0) == pytest.approx(2.0)
    assert hardy_constant(1.0, 0.5, 2.0) == pytest.approx((1.0 - 2.0 ** -0.5) ** -2.0)


def test_hardy_unit_impulse():
    lhs, rhs = hardy_smoothing([1.0, 0.0, 0.0, 0.0], 1.0, 1.0, 1.0, "tail")
    assert (lhs, rhs) == (pytest.approx(1.0), pytest.approx(1.0))


def test_hardy_needs_positive_s():
    with pytest.raises(DomainError):
        hardy_smoothing([1.0], 0.0, 1.0, 1.0)


exponent = st.sampled_from([0.5, 1.0, 2.0, 4.0, math.inf])


@settings(max_examples=60, deadline=None)
@given(
    b=st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=20),
    s=st.floats(min_value=0.2, max_value=2.0),
    q=exponent,
    r=exponent,
    direction=st.sampled_from(["tail", "head"]),
)
def test_hardy_inequality_holds(b, s, q, r, direction):
    lhs, rhs = hardy_smoothing(b, s, q, r, direction)
    assert lhs <= hardy_constant(s, q, r) * rhs * (1.0 + 1e-9) + 1e-300


@settings(max_examples=25, deadline=None)
@given(
    s=st.floats(min_value=-1.0, max_value=2.0),
    ds=st.floats(min_value=0.01, max_value=1.0),
    q=st.sampled_from([0.5, 1.0, 2.0, 4.0]),
    dq=st.sampled_from([0.0, 0.5, 2.0, math.inf]),
    p=st.sampled_from([(2.0, 2.0), (1.0, 3.0), (1.5, 1.5)]),
    scale=st.sampled_from(["F", "B"]),
    seed=st.integers(min_value=0, max_value=2**16),
)
def test_norm_is_monotone_in_s_and_q(s, ds, q, dq, p, scale, seed):
    grid = Grid.cube(2, 2 * math.pi, 64)
    fam = build_family(ISO, grid)
    u = band_limited(grid, ISO, 8.0, rng_for(seed, "monotone"))
    stronger = space_quasi_norm(u, _params(s, p, q, scale), fam).value
    weaker = space_quasi_norm(u, _params(s - ds, p, q + dq, scale), fam).value
    assert weaker <= stronger * (1.0 + 1e-12)
