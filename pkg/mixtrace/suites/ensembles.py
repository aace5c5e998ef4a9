"""Seeded random field ensembles.

Coefficients are drawn on integer frequency indices sorted independently of the grid
size, so a refined grid with the same half periods samples the same continuous field.
"""
import math
import zlib
from typing import Optional, Sequence

import numpy as np

from mixtrace.errors import DomainError
from mixtrace.grid_field import anisotropic_radius, frequency_mesh, synthesize
from mixtrace.models import AnisoBall, AnisoBox, AnisotropyVector, Grid, GridField
from mixtrace.resilience import parallel_map

LOCALIZED_DECAY = 4.5
LOCALIZED_CUTOFF = 2.5


def rng_for(seed: int, *keys) -> np.random.Generator:
    """Generator keyed by the suite seed plus case labels."""
    material = [int(seed)]
    for key in keys:
        if isinstance(key, (int, np.integer)) and key >= 0:
            material.append(int(key))
        else:
            material.append(zlib.crc32(repr(key).encode()))
    return np.random.default_rng(material)


def _integer_mesh(grid: Grid) -> list[np.ndarray]:
    axes = [np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(np.int64) for n in grid.points]
    return np.meshgrid(*axes, indexing="ij")


def _draw(grid: Grid, mask: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if not mask.any():
        raise DomainError("spectral support contains no grid frequency")
    keys = [m[mask] for m in _integer_mesh(grid)]
    order = np.lexsort(keys[::-1])
    count = int(mask.sum())
    draws = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / math.sqrt(2.0 * count)
    coeffs = np.zeros(grid.points, dtype=np.complex128)
    coeffs.flat[np.flatnonzero(mask)[order]] = draws
    return coeffs


def band_limited(
    grid: Grid,
    a: AnisotropyVector,
    radius: float,
    rng: np.random.Generator,
    inner: float = 0.0,
) -> GridField:
    """Standard complex Gaussian coefficients on inner <= |xi|_a <= radius."""
    r = anisotropic_radius(grid, a)
    mask = (r <= radius) & (r >= inner)
    cert = AnisoBall(center=(0.0,) * grid.n, radius=radius, inner=inner, a=a)
    return synthesize(grid, _draw(grid, mask, rng), cert)


def band_limited_box(grid: Grid, halfwidths: Sequence[float], rng: np.random.Generator) -> GridField:
    """Standard complex Gaussian coefficients on the box |xi_k| <= b_k."""
    mask = np.ones(grid.points, dtype=bool)
    for xi, b in zip(frequency_mesh(grid), halfwidths):
        mask &= np.abs(xi) <= b
    return synthesize(grid, _draw(grid, mask, rng), AnisoBox(halfwidths=tuple(halfwidths)))


def localized(
    grid: Grid,
    a: AnisotropyVector,
    radius: float,
    center: Sequence[float],
    amplitude: complex = 1.0,
) -> GridField:
    """Bump at `center` with coefficients exp(-4.5 (|xi|_a / R)^2), cut at 2.5 R, peak value `amplitude`."""
    r = anisotropic_radius(grid, a)
    top = LOCALIZED_CUTOFF * radius
    mesh = frequency_mesh(grid)
    phase = sum(xi * c for xi, c in zip(mesh, center))
    coeffs = np.where(r <= top, np.exp(-LOCALIZED_DECAY * (r / radius) ** 2), 0.0) * np.exp(-1j * phase)
    coeffs *= amplitude / np.exp(-LOCALIZED_DECAY * (r / radius) ** 2)[r <= top].sum()
    return synthesize(grid, coeffs, AnisoBall(center=(0.0,) * grid.n, radius=top, a=a))


def random_point(grid: Grid, rng: np.random.Generator, fraction: float = 0.5, fixed: Optional[dict[int, float]] = None) -> tuple[float, ...]:
    """Uniform point in the central `fraction` of the torus; `fixed` pins 1-based axes."""
    fixed = fixed or {}
    out = []
    for k, h in enumerate(grid.half_periods, start=1):
        value = float(rng.uniform(-fraction * h, fraction * h))
        out.append(fixed.get(k, value))
    return tuple(out)


def mixed_ensemble(
    grid: Grid,
    a: AnisotropyVector,
    radius: float,
    count: int,
    seed: int,
    key: str,
    fixed: Optional[dict[int, float]] = None,
) -> list[tuple[str, GridField]]:
    """Alternating random band-limited fields and localized bumps, all supported in |xi|_a <= radius."""
    def _member(i: int) -> tuple[str, GridField]:
        rng = rng_for(seed, key, i)
        if i % 2 == 0:
            return f"{key}-band-{i}", band_limited(grid, a, radius, rng)
        center = random_point(grid, rng, fixed=fixed)
        return f"{key}-bump-{i}", localized(grid, a, radius / LOCALIZED_CUTOFF, center)

    return parallel_map(_member, range(count))
