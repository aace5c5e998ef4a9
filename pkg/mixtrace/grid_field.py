"""Periodic grid fields: sampling, Fourier multipliers, translation, slicing and spectral support."""
import logging
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import fft as sfft

from mixtrace.errors import DomainError, GridMismatchError
from mixtrace.geometry import aniso_distance
from mixtrace.models import (
    AnisoBall,
    AnisoBox,
    AnisotropyVector,
    Grid,
    GridField,
    SpectralBox,
    SupportCertificate,
    SupportReport,
)
from mixtrace.resilience import get_workers

_LOG = logging.getLogger(__name__)

Symbol = Union[np.ndarray, Callable[..., np.ndarray]]

_SUPPORT_THRESHOLD = 1e-10
_RADIUS_SLACK = 1e-9


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=64)
def frequency_mesh(grid: Grid) -> tuple[np.ndarray, ...]:
    """Dense per-axis frequency arrays over the grid, FFT order."""
    axes = [grid.axis_frequencies(k) for k in range(1, grid.n + 1)]
    return tuple(_readonly(m) for m in np.meshgrid(*axes, indexing="ij"))


@lru_cache(maxsize=64)
def node_mesh(grid: Grid) -> tuple[np.ndarray, ...]:
    axes = [grid.axis_nodes(k) for k in range(1, grid.n + 1)]
    return tuple(_readonly(m) for m in np.meshgrid(*axes, indexing="ij"))


@lru_cache(maxsize=64)
def anisotropic_radius(grid: Grid, a: AnisotropyVector) -> np.ndarray:
    """|xi|_a at every grid frequency."""
    if a.n != grid.n:
        raise DomainError(f"anisotropy of dimension {a.n} on a {grid.n}-dimensional grid")
    return _readonly(np.asarray(aniso_distance(a, np.stack(frequency_mesh(grid)))))


@lru_cache(maxsize=64)
def _node_signs(grid: Grid) -> np.ndarray:
    """(-1)^m per integer frequency index; maps DFT output to coefficients of e^{i xi x}."""
    signs = np.ones(())
    for n in grid.points:
        idx = np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(np.int64)
        signs = np.multiply.outer(signs, np.where(idx % 2 == 0, 1.0, -1.0))
    return _readonly(signs)


def spectrum(u: GridField) -> np.ndarray:
    """Raw forward DFT of the samples."""
    return sfft.fftn(u.values, workers=get_workers())


def from_spectrum(grid: Grid, spec: np.ndarray, cert: Optional[SupportCertificate] = None) -> GridField:
    return GridField(grid=grid, values=sfft.ifftn(spec, workers=get_workers()), support_cert=cert)


def coefficients(u: GridField) -> np.ndarray:
    """c_xi with u(x) = sum_xi c_xi e^{i xi . x} at the nodes."""
    return spectrum(u) * _node_signs(u.grid) / u.grid.size


def synthesize(grid: Grid, coeffs: np.ndarray, cert: Optional[SupportCertificate] = None) -> GridField:
    """Field sum_xi c_xi e^{i xi . x} sampled at the nodes."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.shape != grid.points:
        raise GridMismatchError(f"coefficient shape {coeffs.shape} does not match grid {grid.points}")
    return from_spectrum(grid, coeffs * _node_signs(grid) * grid.size, cert)


def zeros(grid: Grid) -> GridField:
    return GridField(grid=grid, values=np.zeros(grid.points, dtype=np.complex128))


def sample(grid: Grid, rule: Callable[..., np.ndarray]) -> GridField:
    """values[node] = rule(x_1, ..., x_n) at every node; rule must broadcast over mesh arrays."""
    values = np.broadcast_to(np.asarray(rule(*node_mesh(grid)), dtype=np.complex128), grid.points)
    if not np.all(np.isfinite(values)):
        raise DomainError("sampling rule produced non-finite values")
    return GridField(grid=grid, values=values)


def combine(fields: Sequence[GridField], weights: Optional[Sequence[complex]] = None) -> GridField:
    """Pointwise sum_i w_i u_i over fields on one grid."""
    if not fields:
        raise DomainError("cannot combine an empty sequence of fields")
    grid = fields[0].grid
    weights = [1.0] * len(fields) if weights is None else list(weights)
    total = np.zeros(grid.points, dtype=np.complex128)
    for w, f in zip(weights, fields):
        if f.grid != grid:
            raise GridMismatchError("fields live on different grids")
        total += w * f.values
    return GridField(grid=grid, values=total)


def _intersect(old: Optional[SupportCertificate], new: Optional[SupportCertificate]) -> Optional[SupportCertificate]:
    if new is None:
        return old
    if old is None:
        return new
    if isinstance(old, AnisoBall) and isinstance(new, AnisoBall):
        if old.center == new.center and old.weights() == new.weights():
            radius = min(old.radius, new.radius)
            inner = max(old.inner, new.inner)
            if inner <= radius:
                return AnisoBall(center=new.center, radius=radius, inner=inner, a=new.a)
    if isinstance(old, AnisoBox) and isinstance(new, AnisoBox):
        return AnisoBox(halfwidths=tuple(min(x, y) for x, y in zip(old.halfwidths, new.halfwidths)))
    return new


def evaluate_symbol(grid: Grid, symbol: Symbol) -> np.ndarray:
    values = symbol(frequency_mesh(grid)) if callable(symbol) else np.asarray(symbol)
    values = np.broadcast_to(values, grid.points)
    if not np.all(np.isfinite(values)):
        raise DomainError("multiplier symbol is not finite on the grid")
    return values


def fourier_multiplier(
    symbol: Symbol,
    u: GridField,
    support: Optional[SupportCertificate] = None,
) -> GridField:
    """Apply symbol(D): a callable symbol receives the tuple of frequency mesh arrays."""
    values = evaluate_symbol(u.grid, symbol)
    return from_spectrum(u.grid, spectrum(u) * values, _intersect(u.support_cert, support))


def spectral_derivative(u: GridField, axis: int, order: int) -> GridField:
    """(d/dx_axis)^order via the multiplier (i xi_axis)^order."""
    if order == 0:
        return u
    xi = frequency_mesh(u.grid)[axis - 1]
    return fourier_multiplier((1j * xi) ** order, u)


def translate(u: GridField, h: Sequence[float]) -> GridField:
    """tau_h u = u(. - h), exact for band-limited fields with periodic wrap."""
    h = np.asarray(h, dtype=float)
    if h.shape != (u.n,) or not np.all(np.isfinite(h)):
        raise DomainError(f"shift must be a finite point of dimension {u.n}")
    phase = lambda xi: np.exp(-1j * sum(hk * xk for hk, xk in zip(h, xi)))
    return fourier_multiplier(phase, u)


def restrict_hyperplane(u: GridField, axis: int, index: int) -> GridField:
    """Slice x_axis = node `index` (axis 1-based); certificates drop the sliced axis."""
    if u.n < 2:
        raise DomainError("restriction needs a field of dimension >= 2")
    if not 1 <= axis <= u.n:
        raise DomainError(f"axis {axis} outside 1..{u.n}")
    if not 0 <= index < u.grid.points[axis - 1]:
        raise DomainError(f"index {index} outside the grid along axis {axis}")
    cert = u.support_cert
    if isinstance(cert, AnisoBall):
        cert = AnisoBall(
            center=cert.center[: axis - 1] + cert.center[axis:],
            radius=cert.radius,
            a=cert.weights().without(axis),
        )
    elif isinstance(cert, AnisoBox):
        cert = AnisoBox(halfwidths=cert.halfwidths[: axis - 1] + cert.halfwidths[axis:])
    return GridField(
        grid=u.grid.restricted(axis),
        values=np.take(u.values, index, axis=axis - 1),
        support_cert=cert,
    )


def center_index(grid: Grid, axis: int) -> int:
    """Node index of x_axis = 0."""
    return grid.points[axis - 1] // 2


def spectral_support(
    u: GridField,
    threshold: float = _SUPPORT_THRESHOLD,
    a: Optional[AnisotropyVector] = None,
) -> SupportReport:
    """Tight box and |xi|_a range of coefficients above threshold * max."""
    if threshold <= 0:
        raise DomainError("support threshold must be positive")
    mags = np.abs(spectrum(u))
    peak = float(mags.max())
    if peak == 0.0:
        return SupportReport(empty=True)
    mask = mags > threshold * peak
    mesh = frequency_mesh(u.grid)
    lower = tuple(float(m[mask].min()) for m in mesh)
    upper = tuple(float(m[mask].max()) for m in mesh)
    radius = anisotropic_radius(u.grid, a or AnisotropyVector.isotropic(u.n))[mask]
    return SupportReport(
        empty=False,
        box=SpectralBox(lower=lower, upper=upper),
        radius_min=float(radius.min()),
        radius_max=float(radius.max()),
    )


def leakage(u: GridField, cert: SupportCertificate) -> float:
    """Largest coefficient outside the certified set relative to the largest coefficient."""
    mags = np.abs(spectrum(u))
    peak = float(mags.max())
    if peak == 0.0:
        return 0.0
    mesh = frequency_mesh(u.grid)
    if isinstance(cert, AnisoBox):
        inside = np.ones(u.grid.points, dtype=bool)
        for xi, b in zip(mesh, cert.halfwidths):
            inside &= np.abs(xi) <= b * (1.0 + _RADIUS_SLACK)
    else:
        shifted = np.stack([xi - c for xi, c in zip(mesh, cert.center)])
        r = np.asarray(aniso_distance(cert.weights(), shifted))
        inside = (r <= cert.radius * (1.0 + _RADIUS_SLACK)) & (r >= cert.inner * (1.0 - _RADIUS_SLACK))
    outside = mags[~inside]
    return float(outside.max() / peak) if outside.size else 0.0


def certify(u: GridField, threshold: float = _SUPPORT_THRESHOLD) -> bool:
    """True when the field carries a certificate and honours it."""
    if u.support_cert is None:
        return False
    return leakage(u, u.support_cert) <= threshold


def l2_norm(u: GridField) -> float:
    """Grid L2 norm (rectangle rule)."""
    cell = float(np.prod(u.grid.spacing))
    return float(np.sqrt(np.sum(np.abs(u.values) ** 2) * cell))
