"""Tests for exact borderlines, trace verdicts, grid traces and extension operators."""
import math
from fractions import Fraction

import numpy as np
import pytest

from mixtrace.borderlines import (
    ball_threshold,
    besov_embedding_holds,
    bounded_continuous_threshold,
    exact,
    sobolev_embedding_borderline,
    strong_bound,
    trace_bound,
)
from mixtrace.errors import DomainError, ResolutionError, UnsupportedError
from mixtrace.grid_field import center_index, restrict_hyperplane, sample, spectral_derivative
from mixtrace.littlewood_paley import build_family
from mixtrace.models import AnisotropyVector, ExponentVector, Grid, SpaceParams, TraceSpec
from mixtrace.presets import load_golden_table
from mixtrace.suites.borderline import _space, _spec, compare_verdict
from mixtrace.trace_ext import (
    admissible,
    build_extension_family,
    cauchy_trace,
    extend,
    extend_cauchy,
    minimum_axis_grid,
    profile_derivatives,
    profile_support_leakage,
    sobolev_parameters,
    sobolev_trace_conditions,
    trace,
    trace_report,
)

F = Fraction


def _f_space(s, a, p, q=2.0):
    return SpaceParams(s=s, a=AnisotropyVector(a=a, convention="raw"), p=ExponentVector(p=p), q=q, scale="F")


def test_exact_snaps_decimals():
    assert exact(0.5) == F(1, 2)
    assert exact(1 / 3) == F(1, 3)
    assert exact(2) == F(2)
    with pytest.raises(DomainError):
        exact(math.inf)


def test_trace_bound_values():
    assert trace_bound([F(1)] * 3, [F(2)] * 3, 1) == F(1, 2)
    # p_2 = 1/2 adds a_2/p_2 - a_2 = 1
    assert trace_bound([F(1), F(1)], [F(2), F(1, 2)], 1) == F(3, 2)
    assert trace_bound([F(1), F(2)], [F(1, 2), F(4)], 2) == F(3, 2)


def test_strong_bound_sees_q():
    a, p = [F(1), F(1)], [F(2), F(2)]
    assert strong_bound(a, p, F(2), 1) == F(1, 2)
    assert strong_bound(a, p, F(1, 2), 1) == F(3, 2)
    assert strong_bound(a, p, F(1, 2), 2) == F(1, 2)
    with pytest.raises(DomainError):
        strong_bound([F(1)] * 3, [F(2)] * 3, None, 2)


def test_ball_threshold():
    assert ball_threshold([F(1), F(1)], [F(2), F(2)], F(2), "F") == 0
    assert ball_threshold([F(1), F(1)], [F(2), F(1, 2)], None, "B") == F(1)
    assert ball_threshold([F(1), F(1)], [F(2), F(2)], F(1, 2), "F") == F(2)


def test_besov_embedding_equality_case():
    a = [F(1), F(1)]
    p, r = [F(1), F(1)], [F(2), F(2)]
    # t - a.(1/r) = s - a.(1/p) with t = s - 1
    assert besov_embedding_holds(F(2), p, F(1), F(1), r, F(2), a)
    assert not besov_embedding_holds(F(2), p, F(2), F(1), r, F(1), a)
    assert besov_embedding_holds(F(2), p, F(2), F(1, 2), r, F(1), a)
    assert not besov_embedding_holds(F(2), r, F(1), F(1), p, F(1), a)


def test_golden_table_verdicts():
    rows = load_golden_table()
    assert rows
    for row in rows:
        verdict = admissible(_space(row), _spec(row))
        assert compare_verdict(verdict, row.get("expect", {})) == [], row["id"]


def test_verdict_scales_with_lambda():
    base = admissible(_f_space(1.0, (1.0, 2.0), (2.0, 3.0)), TraceSpec(axis=2))
    scaled = admissible(_f_space(2.0, (2.0, 4.0), (2.0, 3.0)), TraceSpec(axis=2))
    assert base.admissible == scaled.admissible
    assert Fraction(scaled.bound) == 2 * Fraction(base.bound)


def test_trace_space_arithmetic():
    v = admissible(_f_space(2.0, (1.0, 1.0, 1.0), (2.0, 2.0, 2.0)), TraceSpec(axis=3, order=1))
    assert v.admissible
    assert v.trace_space.scale == "B"
    assert v.trace_space.s == "1/2"
    assert v.trace_space.q == "2"
    assert v.bound == "3/2"


def test_verdict_rejections():
    with pytest.raises(UnsupportedError):
        admissible(_f_space(1.0, (1.0, 1.0, 1.0), (2.0, 2.0, 2.0)), TraceSpec(axis=2))
    with pytest.raises(UnsupportedError):
        admissible(_f_space(1.0, (1.0,), (2.0,)), TraceSpec(axis=1))
    sp = _f_space(1.0, (1.0, 1.0), (2.0, 2.0)).model_copy(update={"scale": "B"})
    with pytest.raises(UnsupportedError):
        admissible(sp, TraceSpec(axis=1))


def test_sobolev_parameters():
    s, a = sobolev_parameters([1, 2], "harmonic")
    assert s == F(4, 3)
    assert a.a == pytest.approx((4 / 3, 2 / 3))
    s, a = sobolev_parameters([1, 2], "max")
    assert s == 2
    assert a.a == (2.0, 1.0)
    with pytest.raises(DomainError):
        sobolev_parameters([0, 1])


def test_sobolev_trace_conditions_isotropic():
    # W^1_2 in two dimensions has traces on both axes
    assert sobolev_trace_conditions([1, 1], [2.0, 2.0]) == (True, True)


def test_grid_trace_of_band_limited_field(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.cos(2 * x1) * np.exp(1j * x2) + np.sin(x1))
    fam = build_family(AnisotropyVector.isotropic(2), torus_grid)
    spec = TraceSpec(axis=1)
    t = trace(u, spec, fam)
    direct = restrict_hyperplane(u, 1, center_index(torus_grid, 1))
    assert np.allclose(t.values, direct.values, atol=1e-12)
    d1 = trace(u, TraceSpec(axis=1, order=1), fam)
    expected = restrict_hyperplane(spectral_derivative(u, 1, 1), 1, center_index(torus_grid, 1))
    assert np.allclose(d1.values, expected.values, atol=1e-10)
    rows = cauchy_trace(u, TraceSpec(axis=1, m=2), fam)
    assert len(rows) == 2


def test_trace_sums_blocks_up_to_j_max(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.exp(1j * x2) + np.exp(6j * x2))
    fam = build_family(AnisotropyVector.isotropic(2), torus_grid, j_max=1)
    spec = TraceSpec(axis=1)
    nodes = torus_grid.axis_nodes(2)
    assert np.allclose(trace(u, spec, fam).values, np.exp(1j * nodes), atol=1e-12)
    whole = trace(u, spec, fam, include_remainder=True)
    assert np.allclose(whole.values, np.exp(1j * nodes) + np.exp(6j * nodes), atol=1e-12)
    report = trace_report(u, spec, fam)
    assert report.remainder_ratio == pytest.approx(1.0, rel=1e-9)
    assert not report.converged


def test_trace_report_converges(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.exp(1j * (x1 + 2 * x2)))
    fam = build_family(AnisotropyVector.isotropic(2), torus_grid)
    report = trace_report(u, TraceSpec(axis=2), fam, ExponentVector(p=(1.5, 2.0)))
    assert report.converged
    assert report.r == (1.5,)
    assert report.total_norm == pytest.approx((2 * math.pi) ** (1 / 1.5))
    assert report.continuity


def test_extension_profiles_are_moment_orthogonal():
    fam = build_extension_family(axis=2, moment_order=2)
    assert fam.residual < 1e-10
    for nu in range(3):
        derivs = profile_derivatives(fam, nu)
        expected = np.zeros(3)
        expected[nu] = 1.0
        assert np.allclose(derivs, expected, atol=1e-8)
        assert profile_support_leakage(fam, nu) == 0.0


def test_extension_family_rejects_negative_order():
    with pytest.raises(DomainError):
        build_extension_family(axis=1, moment_order=-1)


@pytest.fixture
def tangential():
    grid = Grid.cube(1, math.pi, 32)
    return grid, build_family(AnisotropyVector(a=(1.0,)), grid)


def test_trace_of_extension_is_identity(tangential):
    grid, lp = tangential
    fam = build_extension_family(axis=2, moment_order=1)
    half, points = minimum_axis_grid(fam, lp.j_max + 1)
    v = sample(grid, lambda x: np.cos(3 * x) + 0.5j * np.sin(x))
    w = extend(v, fam, lp, half, points)
    assert w.grid.points == (32, points)
    i = center_index(w.grid, 2)
    assert np.allclose(restrict_hyperplane(w, 2, i).values, v.values, atol=1e-8)
    normal = restrict_hyperplane(spectral_derivative(w, 2, 1), 2, i)
    assert np.max(np.abs(normal.values)) < 1e-7


def test_cauchy_extension_reproduces_data(tangential):
    grid, lp = tangential
    fam = build_extension_family(axis=1, moment_order=1)
    half, points = minimum_axis_grid(fam, lp.j_max + 1)
    v0 = sample(grid, lambda x: np.cos(2 * x))
    v1 = sample(grid, lambda x: np.exp(1j * x))
    w = extend_cauchy([v0, v1], fam, lp, half, points)
    i = center_index(w.grid, 1)
    assert np.allclose(restrict_hyperplane(w, 1, i).values, v0.values, atol=1e-8)
    assert np.allclose(restrict_hyperplane(spectral_derivative(w, 1, 1), 1, i).values, v1.values, atol=1e-7)
    with pytest.raises(DomainError):
        extend_cauchy([v0, v1, v1], fam, lp, half, points)


def test_extension_needs_resolving_axis(tangential):
    grid, lp = tangential
    fam = build_extension_family(axis=2, moment_order=1)
    v = sample(grid, lambda x: np.cos(3 * x))
    with pytest.raises(ResolutionError):
        extend(v, fam, lp, math.pi, 16)


def test_embedding_thresholds():
    assert bounded_continuous_threshold([F(1), F(2)], [F(2), F(4)]) == F(1)
    # 1/p_1 plus the (1/p_k - 1)_+ corrections
    assert sobolev_embedding_borderline([F(2), F(1, 2), F(3)]) == F(3, 2)
