"""Tests for the anisotropic distance, dilations and normalization."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from mixtrace.errors import DomainError
from mixtrace.geometry import aniso_dilate, aniso_distance, normalize_anisotropy
from mixtrace.models import AnisotropyVector

coords = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False, allow_infinity=False).filter(lambda v: v == 0.0 or abs(v) > 1e-6)


@st.composite
def weights_and_points(draw, low=0.5, high=3.0, count=2):
    n = draw(st.integers(min_value=1, max_value=4))
    w = tuple(draw(st.floats(min_value=low, max_value=high)) for _ in range(n))
    pts = [tuple(draw(coords) for _ in range(n)) for _ in range(count)]
    return AnisotropyVector(a=w, convention="raw"), pts


def test_euclidean_case():
    assert aniso_distance(AnisotropyVector(a=(1.0, 1.0)), (3.0, 4.0)) == pytest.approx(5.0, rel=1e-12)


def test_single_coordinate():
    assert aniso_distance(AnisotropyVector(a=(1.0, 2.0)), (0.0, 9.0)) == pytest.approx(3.0, rel=1e-12)


def test_mixed_weights_root():
    expected = math.sqrt((9.0 + math.sqrt(145.0)) / 2.0)
    assert aniso_distance(AnisotropyVector(a=(1.0, 2.0)), (3.0, 4.0)) == pytest.approx(expected, rel=1e-12)


def test_origin_is_zero():
    assert aniso_distance(AnisotropyVector(a=(1.0, 2.0, 3.0)), (0.0, 0.0, 0.0)) == 0.0


def test_stacked_points_keep_shape():
    a = AnisotropyVector(a=(1.0, 2.0))
    pts = np.zeros((2, 3, 4))
    pts[0] = 3.0
    pts[1] = 4.0
    out = aniso_distance(a, pts)
    assert out.shape == (3, 4)
    assert np.allclose(out, aniso_distance(a, (3.0, 4.0)), rtol=1e-12)


def test_non_finite_point_rejected():
    with pytest.raises(DomainError):
        aniso_distance(AnisotropyVector(a=(1.0, 1.0)), (math.nan, 1.0))


def test_wrong_dimension_rejected():
    with pytest.raises(DomainError):
        aniso_distance(AnisotropyVector(a=(1.0, 1.0)), (1.0, 2.0, 3.0))


def test_dilate_definition():
    out = aniso_dilate(2.0, AnisotropyVector(a=(1.0, 2.0)), (1.0, 1.0))
    assert np.allclose(out, (2.0, 4.0))


def test_dilate_identity():
    x = np.array([0.3, -1.7])
    assert np.array_equal(aniso_dilate(1.0, AnisotropyVector(a=(1.0, 2.5), convention="raw"), x), x)


@pytest.mark.parametrize("t", [0.0, -1.0, math.inf])
def test_dilate_rejects_bad_parameter(t):
    with pytest.raises(DomainError):
        aniso_dilate(t, AnisotropyVector(a=(1.0, 2.0)), (1.0, 1.0))


@settings(max_examples=300, deadline=None)
@given(weights_and_points(count=1), st.floats(min_value=1e-2, max_value=1e2))
def test_homogeneity(data, t):
    a, (x,) = data
    lhs = aniso_distance(a, aniso_dilate(t, a, x))
    rhs = t * aniso_distance(a, x)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-300)


@settings(max_examples=300, deadline=None)
@given(weights_and_points(low=1.0, count=2))
def test_triangle_inequality(data):
    a, (x, y) = data
    s = tuple(xi + yi for xi, yi in zip(x, y))
    assert aniso_distance(a, s) <= aniso_distance(a, x) + aniso_distance(a, y) + 1e-10


@settings(max_examples=300, deadline=None)
@given(weights_and_points(count=1))
def test_sandwich(data):
    a, (x,) = data
    d = aniso_distance(a, x)
    powers = [abs(xk) ** (1.0 / w) for xk, w in zip(x, a.a)]
    assert max(powers) <= d * (1 + 1e-10) + 1e-12
    assert d <= sum(powers) * (1 + 1e-10) + 1e-12


def test_normalize_min_one():
    b, lam = normalize_anisotropy(AnisotropyVector(a=(2.0, 4.0), convention="raw"), "min_one")
    assert b.a == (1.0, 2.0)
    assert b.convention == "min_one"
    assert lam == 0.5


def test_normalize_sum_n():
    b, lam = normalize_anisotropy(AnisotropyVector(a=(1.0, 2.0)), "sum_n")
    assert b.a == pytest.approx((2.0 / 3.0, 4.0 / 3.0), rel=1e-14)
    assert lam == pytest.approx(2.0 / 3.0)
    assert b.convention == "sum_n"


def test_normalize_raw_is_identity():
    a = AnisotropyVector(a=(1.0, 3.0))
    b, lam = normalize_anisotropy(a, "raw")
    assert b.a == a.a and lam == 1.0


def test_convention_checked():
    with pytest.raises(ValidationError):
        AnisotropyVector(a=(2.0, 3.0))
    with pytest.raises(ValidationError):
        AnisotropyVector(a=(1.0, 2.0), convention="sum_n")
    with pytest.raises(ValidationError):
        AnisotropyVector(a=(1.0, -1.0), convention="raw")
