"""Tests for grid fields: sampling, multipliers, translation, restriction and spectral support."""
import math

import numpy as np
import pytest

from mixtrace.errors import DomainError, FieldFormatError, GridMismatchError
from mixtrace.fieldio import dumps, loads
from mixtrace.grid_field import (
    center_index,
    certify,
    coefficients,
    combine,
    fourier_multiplier,
    l2_norm,
    leakage,
    restrict_hyperplane,
    sample,
    spectral_derivative,
    spectral_support,
    synthesize,
    translate,
)
from mixtrace.littlewood_paley import build_family, decompose
from mixtrace.models import AnisoBall, AnisoBox, AnisotropyVector, ExponentVector, Grid, GridField, SpaceParams
from mixtrace.norms import space_quasi_norm


def _random_field(grid, rng):
    values = rng.standard_normal(grid.points) + 1j * rng.standard_normal(grid.points)
    return GridField(grid=grid, values=values)


def test_sample_constant(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.ones_like(x1))
    assert np.allclose(u.values, 1.0)


def test_center_index_is_origin(torus_grid):
    i = center_index(torus_grid, 1)
    assert torus_grid.axis_nodes(1)[i] == pytest.approx(0.0, abs=1e-15)


def test_pure_mode_has_one_coefficient(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.exp(1j * x1))
    c = coefficients(u)
    assert c[1, 0] == pytest.approx(1.0, abs=1e-12)
    c[1, 0] = 0.0
    assert np.max(np.abs(c)) < 1e-12


def test_synthesize_inverts_coefficients(torus_grid, rng):
    u = _random_field(torus_grid, rng)
    back = synthesize(torus_grid, coefficients(u))
    assert np.allclose(back.values, u.values, atol=1e-12)


def test_synthesize_rejects_wrong_shape(torus_grid):
    with pytest.raises(GridMismatchError):
        synthesize(torus_grid, np.zeros((4, 4)))


def test_sample_rejects_nonfinite(torus_grid):
    with pytest.raises(DomainError):
        sample(torus_grid, lambda x1, x2: np.full_like(x1, np.inf))


def test_identity_multiplier(torus_grid, rng):
    u = _random_field(torus_grid, rng)
    v = fourier_multiplier(lambda xi: np.ones_like(xi[0]), u)
    assert np.allclose(v.values, u.values, atol=1e-12)


def test_derivative_of_mode(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.exp(1j * (x1 + 2 * x2)))
    d2 = spectral_derivative(u, 2, 1)
    assert np.allclose(d2.values, 2j * u.values, atol=1e-10)
    d11 = spectral_derivative(u, 1, 2)
    assert np.allclose(d11.values, -u.values, atol=1e-10)


def test_translate_by_spacing_rolls_samples(torus_grid, rng):
    u = _random_field(torus_grid, rng)
    h = torus_grid.spacing[0]
    v = translate(u, (h, 0.0))
    assert np.allclose(v.values, np.roll(u.values, 1, axis=0), atol=1e-10)


def test_translate_mode_phase(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.exp(1j * 3 * x2))
    v = translate(u, (0.0, 0.4))
    assert np.allclose(v.values, np.exp(-1j * 3 * 0.4) * u.values, atol=1e-10)


@pytest.mark.parametrize("scale", ["F", "B"])
def test_translation_difference_shrinks_with_the_shift(torus_grid, scale):
    u = sample(torus_grid, lambda x1, x2: np.exp(np.cos(x1) + np.sin(2 * x2)))
    a = AnisotropyVector.isotropic(2)
    sp = SpaceParams(s=0.5, a=a, p=ExponentVector(p=(2.0, 2.0)), q=2.0, scale=scale)
    fam = build_family(a, torus_grid)
    values = []
    for m in range(8):
        shifted = translate(u, (0.5 * 2.0 ** -m, 0.3 * 2.0 ** -m))
        values.append(space_quasi_norm(combine([shifted, u], [1.0, -1.0]), sp, fam).value)
    assert all(later < earlier for earlier, later in zip(values, values[1:]))
    assert values[-1] < values[0] / 64


def test_translate_rejects_bad_shift(torus_grid, rng):
    u = _random_field(torus_grid, rng)
    with pytest.raises(DomainError):
        translate(u, (1.0,))
    with pytest.raises(DomainError):
        translate(u, (math.nan, 0.0))


def test_restrict_tensor_product(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.cos(x1) * np.exp(2j * x2))
    trace = restrict_hyperplane(u, 1, center_index(torus_grid, 1))
    assert trace.grid == Grid.cube(1, math.pi, 32)
    expected = np.exp(2j * torus_grid.axis_nodes(2))
    assert np.allclose(trace.values, expected, atol=1e-12)


def test_restrict_drops_certificate_axis(torus_grid):
    cert = AnisoBall(center=(0.0, 0.0), radius=4.0, a=AnisotropyVector(a=(1.0, 2.0)))
    u = GridField(grid=torus_grid, values=np.zeros(torus_grid.points), support_cert=cert)
    trace = restrict_hyperplane(u, 2, 0)
    assert trace.support_cert.center == (0.0,)
    assert trace.support_cert.radius == 4.0


def test_restrict_errors(torus_grid, rng):
    u = _random_field(torus_grid, rng)
    with pytest.raises(DomainError):
        restrict_hyperplane(u, 3, 0)
    with pytest.raises(DomainError):
        restrict_hyperplane(u, 1, 32)
    line = restrict_hyperplane(u, 1, 0)
    with pytest.raises(DomainError):
        restrict_hyperplane(line, 1, 0)


def test_spectral_support_box(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.exp(1j * (2 * x1 - x2)) + np.exp(-3j * x1))
    report = spectral_support(u)
    assert not report.empty
    assert report.box.lower == (-3.0, -1.0)
    assert report.box.upper == (2.0, 0.0)
    assert report.radius_max == pytest.approx(3.0)


def test_spectral_support_empty(torus_grid):
    u = GridField(grid=torus_grid, values=np.zeros(torus_grid.points))
    assert spectral_support(u).empty


def test_parseval(torus_grid, rng):
    u = _random_field(torus_grid, rng)
    c = coefficients(u)
    assert l2_norm(u) ** 2 == pytest.approx(torus_grid.volume * np.sum(np.abs(c) ** 2), rel=1e-10)


def test_leakage_and_certify(torus_grid):
    u = sample(torus_grid, lambda x1, x2: np.exp(1j * x1) + 0.5 * np.exp(5j * x2))
    assert leakage(u, AnisoBox(halfwidths=(1.0, 5.0))) < 1e-12
    assert leakage(u, AnisoBox(halfwidths=(1.0, 1.0))) == pytest.approx(0.5, rel=1e-9)
    assert not certify(u)
    certified = u.model_copy(update={"support_cert": AnisoBall(center=(0.0, 0.0), radius=5.0)})
    assert certify(certified)


def test_certificate_is_checked_on_demand(torus_grid, rng):
    u = sample(torus_grid, lambda x1, x2: np.exp(6j * x1))
    wrong = GridField(grid=torus_grid, values=u.values, support_cert=AnisoBall(center=(0.0, 0.0), radius=2.0))
    assert not certify(wrong)
    assert leakage(wrong, wrong.support_cert) == pytest.approx(1.0)
    fam = build_family(AnisotropyVector.isotropic(2), torus_grid)
    blocks = decompose(_random_field(torus_grid, rng), fam).blocks
    assert all(certify(block) for block in blocks)


def test_multiplier_intersects_balls(torus_grid):
    ball = AnisoBall(center=(0.0, 0.0), radius=6.0)
    u = GridField(grid=torus_grid, values=np.zeros(torus_grid.points), support_cert=ball)
    v = fourier_multiplier(1.0, u, AnisoBall(center=(0.0, 0.0), radius=3.0, inner=1.0))
    assert v.support_cert.radius == 3.0
    assert v.support_cert.inner == 1.0


def test_combine(torus_grid, rng):
    u = _random_field(torus_grid, rng)
    v = _random_field(torus_grid, rng)
    w = combine([u, v], [2.0, -1.0])
    assert np.allclose(w.values, 2.0 * u.values - v.values)
    other = GridField(grid=Grid.cube(2, math.pi, 16), values=np.zeros((16, 16)))
    with pytest.raises(GridMismatchError):
        combine([u, other])
    with pytest.raises(DomainError):
        combine([])


def test_field_container_round_trip(torus_grid, rng):
    cert = AnisoBall(center=(0.0, 0.0), radius=7.5, inner=1.0, a=AnisotropyVector(a=(1.0, 1.5)))
    u = _random_field(torus_grid, rng).model_copy(update={"support_cert": cert})
    back = loads(dumps(u))
    assert back.grid == u.grid
    assert back.support_cert == cert
    assert np.array_equal(back.values, u.values)


def test_field_container_rejects_garbage():
    with pytest.raises(FieldFormatError):
        loads(b"NOPE" + b"\x00" * 20)
    with pytest.raises(FieldFormatError):
        loads(b"MT")
