"""Directional Hardy-Littlewood maximal functions, their iterates and the Peetre maximal function."""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from mixtrace.errors import DomainError
from mixtrace.models import Grid, GridField, MaximalParams

_LOG = logging.getLogger(__name__)


def default_radii(grid: Grid, axis: int) -> tuple[float, ...]:
    """Delta_k * 2^m for m = 0 .. log2(N_k / 2)."""
    delta = grid.spacing[axis - 1]
    top = int(math.log2(grid.points[axis - 1] // 2))
    return tuple(delta * 2.0 ** m for m in range(top + 1))


def _window_sup(mag: np.ndarray, ax: int, delta: float, radii: Sequence[float]) -> np.ndarray:
    """Sup over radii of centred periodic window averages along array axis ax."""
    best = np.zeros_like(mag)
    n = mag.shape[ax]
    for r in sorted(set(max(0, int(round(rad / delta))) for rad in radii)):
        width = 2 * r + 1
        pad = [(0, 0)] * mag.ndim
        pad[ax] = (r + 1, r)
        padded = np.pad(mag, pad, mode="wrap")
        sums = np.cumsum(padded, axis=ax)
        upper = np.take(sums, np.arange(width, width + n), axis=ax)
        lower = np.take(sums, np.arange(0, n), axis=ax)
        np.maximum(best, (upper - lower) / width, out=best)
    return best


def _as_field(grid: Grid, values: np.ndarray) -> GridField:
    return GridField(grid=grid, values=values.astype(np.complex128))


def _check_axis(u: GridField, axis: int) -> None:
    if not 1 <= axis <= u.n:
        raise DomainError(f"axis {axis} outside 1..{u.n}")


def directional_maximal(u: GridField, axis: int, radii: Optional[Sequence[float]] = None) -> GridField:
    """M_k u: sup over radii of centred interval averages of |u| along axis k (periodic)."""
    _check_axis(u, axis)
    radii = radii or default_radii(u.grid, axis)
    if not radii:
        raise DomainError("radius set must be nonempty")
    mag = np.abs(u.values)
    return _as_field(u.grid, _window_sup(mag, axis - 1, u.grid.spacing[axis - 1], radii))


def iterated_maximal(u: GridField, params: MaximalParams) -> GridField:
    """(M_n(... M_2(M_1|u|^{t_1})^{t_2/t_1} ...)^{t_n/t_{n-1}})^{1/t_n}."""
    if len(params.t) != u.n:
        raise DomainError(f"{len(params.t)} exponents for a {u.n}-dimensional field")
    g = np.abs(u.values) ** params.t[0]
    prev = params.t[0]
    for axis in range(1, u.n + 1):
        t = params.t[axis - 1]
        if axis > 1:
            g = g ** (t / prev)
        radii = params.radii[axis - 1] if params.radii else default_radii(u.grid, axis)
        g = _window_sup(g, axis - 1, u.grid.spacing[axis - 1], radii)
        prev = t
    return _as_field(u.grid, g ** (1.0 / prev))


def _peetre_axis(g: np.ndarray, ax: int, grid: Grid, b: float, r: float) -> np.ndarray:
    n = grid.points[ax]
    delta = grid.spacing[ax]
    best = g.copy()
    floor = float(g.min())
    top = float(g.max())
    # shifts in order of increasing |z|; weights decrease so later shifts cannot win
    for m in range(1, n // 2 + 1):
        z = m * delta
        w = 1.0 / (1.0 + (b * z) ** (1.0 / r))
        if top * w < floor:
            break
        np.maximum(best, np.roll(g, m, axis=ax) * w, out=best)
        if m != n // 2:
            np.maximum(best, np.roll(g, -m, axis=ax) * w, out=best)
    return best


def peetre_maximal(u: GridField, params: MaximalParams) -> GridField:
    """u*(r, b; x) = sup_z |u(x - z)| / prod_k (1 + |b_k z_k|^{1/r_k}) over periodic grid shifts."""
    if len(params.t) != u.n:
        raise DomainError(f"{len(params.t)} exponents for a {u.n}-dimensional field")
    b = params.b or (1.0,) * u.n
    g = np.abs(u.values)
    # the weight is a product, so the joint sup is an iterated sup over axes
    for axis in range(u.n):
        g = _peetre_axis(g, axis, u.grid, b[axis], params.t[axis])
    return _as_field(u.grid, g)
