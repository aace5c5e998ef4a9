"""Borderline counterexample family w_l, v_j = (1/j) sum_{l=j+1}^{2j} w_l and norm-asymptotics fits.

Two layouts are available. ``full`` materializes v_j on one n-dimensional grid and
measures it through the dyadic decomposition. ``reduced`` never builds v_j: each
tensor factor of w_l lives on its own 1-D grid rescaled with l, and norms follow from
the tensor identities ||f (x) g||_{L_p} = ||f||_{p_1} ||g||_{p_2}. The reduced layout
reaches the large j needed for asymptotic fits.
"""
import csv
import logging
import math
from pathlib import Path
from typing import Literal, Optional, Sequence

import numpy as np

from mixtrace.borderlines import exact, trace_bound
from mixtrace.errors import DomainError, ResolutionError, UnsupportedError
from mixtrace.grid_field import center_index, coefficients, restrict_hyperplane, synthesize
from mixtrace.littlewood_paley import build_family, lp_symbol
from mixtrace.models import (
    AnisotropyVector,
    CounterexampleFamily,
    ExponentVector,
    FitResult,
    Grid,
    GridField,
    SpaceParams,
)
from mixtrace.norms import lq, mixed_lp_norm, space_quasi_norm
from mixtrace.resilience import parallel_map

_LOG = logging.getLogger(__name__)

G_INNER = 0.8
_HEADROOM = 1.25


def build_counterexample_family(
    axis: int,
    a: AnisotropyVector,
    p: ExponentVector,
    j_min: int = 4,
    j_max: int = 12,
    layout: Literal["full", "reduced"] = "reduced",
    profile_points: int = 64,
    max_axis_points: int = 4096,
) -> CounterexampleFamily:
    n = a.n
    if n < 2 or p.n != n:
        raise DomainError("counterexamples need matching anisotropy and exponents in dimension >= 2")
    if not 1 <= axis <= n:
        raise DomainError(f"axis {axis} outside 1..{n}")
    if not p.finite:
        raise UnsupportedError("counterexamples need finite exponents")
    if j_max < j_min:
        raise DomainError("empty j range")
    others = [k for k in range(1, n + 1) if k != axis]
    return CounterexampleFamily(
        axis=axis,
        a=a,
        p=p,
        ge_axes=tuple(k for k in others if p.p[k - 1] >= 1),
        lt_axes=tuple(k for k in others if p.p[k - 1] < 1),
        f_width=(10.0 * n) ** (-a.a0),
        g_band=(G_INNER ** a.a[axis - 1], 1.0),
        j_min=j_min,
        j_max=j_max,
        layout=layout,
        profile_points=profile_points,
        max_axis_points=max_axis_points,
    )


def borderline_smoothness(fam: CounterexampleFamily) -> float:
    """a_m/p_m + sum_{k != m} (a_k/p_k - a_k)_+."""
    return float(trace_bound([exact(x) for x in fam.a.a], [exact(x) for x in fam.p.p], fam.axis))


def _bump(tau: np.ndarray, center: float, halfwidth: float) -> np.ndarray:
    z = (np.asarray(tau, dtype=float) - center) / halfwidth
    inside = np.abs(z) < 1.0
    out = np.zeros_like(z)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - z[inside] ** 2))
    return out


def f_transform(fam: CounterexampleFamily, tau) -> np.ndarray:
    """Ff: bump with Ff(0) = 1 supported in |tau| < (10n)^{-a0}."""
    return _bump(tau, 0.0, fam.f_width)


def g_transform(fam: CounterexampleFamily, tau) -> np.ndarray:
    """Even bump on +-[lo, 1]; normalized later on the grid so g(0) = 1."""
    lo, hi = fam.g_band
    tau = np.abs(np.asarray(tau, dtype=float))
    return _bump(tau, 0.5 * (lo + hi), 0.5 * (hi - lo))


def _pow2(value: float, floor: int) -> int:
    return max(floor, 1 << int(math.ceil(math.log2(max(value, 1.0)))))


def _axis_grid(fam: CounterexampleFamily, k: int, j: int, l: int) -> Grid:
    """1-D grid carrying the axis-k factor of w_l."""
    w = fam.a.a[k - 1]
    if k == fam.axis:
        lo = fam.g_band[0]
        if fam.layout == "reduced":
            half = 8.0 * math.pi / (1.0 - lo)
            points = _pow2(2.0 * half * _HEADROOM / math.pi, fam.profile_points)
            return Grid(half_periods=(half * 2.0 ** (-l * w),), points=(points,))
        half = 4.0 * math.pi / (2.0 ** ((j + 1) * w) * (1.0 - lo))
        top = _HEADROOM * 2.0 ** (2 * j * w)
        return Grid(half_periods=(half,), points=(_pow2(2.0 * half * top / math.pi, 16),))

    eps = fam.f_width
    half = 6.0 * math.pi / eps
    if k in fam.ge_axes:
        return Grid(half_periods=(half,), points=(32,))
    if fam.layout == "reduced":
        return Grid(half_periods=(half * 2.0 ** (-l * w),), points=(32,))
    half = 6.0 * math.pi / (eps * 2.0 ** ((j + 1) * w))
    top = _HEADROOM * eps * 2.0 ** (2 * j * w)
    return Grid(half_periods=(half,), points=(_pow2(2.0 * half * top / math.pi, 32),))


def _factor(fam: CounterexampleFamily, k: int, l: int, grid: Grid) -> GridField:
    xi = grid.axis_frequencies(1)
    w = fam.a.a[k - 1]
    if k == fam.axis:
        coeffs = g_transform(fam, xi * 2.0 ** (-l * w))
        coeffs = coeffs / coeffs.sum()
    elif k in fam.ge_axes:
        coeffs = f_transform(fam, xi) / (2.0 * grid.half_periods[0])
    else:
        coeffs = f_transform(fam, xi * 2.0 ** (-l * w)) / (2.0 * grid.half_periods[0])
    return synthesize(grid, coeffs)


def factors(fam: CounterexampleFamily, j: int, l: int) -> list[GridField]:
    """Axis factors of w_l, axis 1 first."""
    return [_factor(fam, k, l, _axis_grid(fam, k, j, l)) for k in range(1, fam.a.n + 1)]


def _levels(j: int) -> range:
    return range(j + 1, 2 * j + 1)


def _full_grid(fam: CounterexampleFamily, j: int) -> Grid:
    axes = [_axis_grid(fam, k, j, j + 1) for k in range(1, fam.a.n + 1)]
    grid = Grid(half_periods=tuple(g.half_periods[0] for g in axes), points=tuple(g.points[0] for g in axes))
    if max(grid.points) > fam.max_axis_points:
        raise ResolutionError(
            f"full layout at j={j} needs axis points {grid.points}, above the limit {fam.max_axis_points}; "
            f"raise max_axis_points or use the reduced layout"
        )
    return grid


def build_v_j(fam: CounterexampleFamily, j: int) -> GridField:
    """v_j on the full-layout grid."""
    if j < 1:
        raise DomainError("j must be positive")
    if fam.layout != "full":
        raise UnsupportedError("v_j is materialized only in the full layout")
    grid = _full_grid(fam, j)
    total = np.zeros(grid.points, dtype=np.complex128)
    for l in _levels(j):
        term = np.ones(())
        for f in factors(fam, j, l):
            term = np.multiply.outer(term, f.values)
        total += term
    return GridField(grid=grid, values=total / j)


def plateau_defect(fam: CounterexampleFamily, j: int, threshold: float = 1e-12) -> float:
    """max |Phi_l - 1| over the spectral support of w_l, l = j+1..2j."""
    worst = 0.0
    for l in _levels(j):
        axes = []
        for k, f in enumerate(factors(fam, j, l), start=1):
            xi = f.grid.axis_frequencies(1)
            mags = np.abs(coefficients(f))
            axes.append(xi[mags > threshold * mags.max()])
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"))
        worst = max(worst, float(np.abs(lp_symbol(fam.a, l, mesh) - 1.0).max()))
    return worst


def _factor_norms(fam: CounterexampleFamily, j: int, l: int) -> float:
    return float(np.prod([
        mixed_lp_norm(f, ExponentVector(p=(fam.p.p[k - 1],)))
        for k, f in enumerate(factors(fam, j, l), start=1)
    ]))


def tensor_besov_norm(fam: CounterexampleFamily, j: int, s: float, q: float) -> float:
    """(1/j) ||(2^{sl} ||w_l||_{L_p})_l||_{l_q} from the tensor identity."""
    return lq([2.0 ** (s * l) * _factor_norms(fam, j, l) for l in _levels(j)], q) / j


def tensor_f_norm(fam: CounterexampleFamily, j: int, s: float) -> float:
    """F norm with q = p_m when every other factor is independent of l (no x_< axes)."""
    if fam.lt_axes:
        raise UnsupportedError("tensor F norm needs all p_k >= 1 off the axis m")
    m = fam.axis
    pm = fam.p.p[m - 1]
    per_level = []
    rest = None
    for l in _levels(j):
        fs = factors(fam, j, l)
        per_level.append(2.0 ** (s * l) * mixed_lp_norm(fs[m - 1], ExponentVector(p=(pm,))))
        if rest is None:
            rest = float(np.prod([
                mixed_lp_norm(f, ExponentVector(p=(fam.p.p[k - 1],)))
                for k, f in enumerate(fs, start=1) if k != m
            ]))
    return rest * lq(per_level, pm) / j


def counterexample_norm(
    fam: CounterexampleFamily,
    j: int,
    s: float,
    q: float,
    scale: Literal["B", "F"] = "B",
) -> float:
    """||v_j|| in B^{s,a}_{p,q} or F^{s,a}_{p,q} under the family layout."""
    if fam.layout == "reduced":
        if scale == "B":
            return tensor_besov_norm(fam, j, s, q)
        if q != fam.p.p[fam.axis - 1]:
            raise UnsupportedError("reduced-layout F norms need q = p_m")
        return tensor_f_norm(fam, j, s)
    v = build_v_j(fam, j)
    lp = build_family(fam.a, v.grid, j_max=2 * j + 1)
    sp = SpaceParams(s=s, a=fam.a, p=fam.p, q=q, scale=scale)
    return space_quasi_norm(v, sp, lp).value


def trace_slice_norm(fam: CounterexampleFamily, j: int) -> float:
    """||gamma_{0,m} v_j||_{L_r''} with r_k = max(1, p_k)."""
    r = ExponentVector(p=fam.p.r()).without(fam.axis)
    if fam.layout == "reduced":
        if fam.lt_axes:
            raise UnsupportedError("reduced-layout slices need all p_k >= 1 off the axis m")
        # g_l(0) = 1 for every l, so the slice is the product of the f factors
        fs = [f for k, f in enumerate(factors(fam, j, j + 1), start=1) if k != fam.axis]
        return float(np.prod([mixed_lp_norm(f, ExponentVector(p=(rk,))) for f, rk in zip(fs, r.p)]))
    v = build_v_j(fam, j)
    return mixed_lp_norm(restrict_hyperplane(v, fam.axis, center_index(v.grid, fam.axis)), r)


def dilation_absorption(fam: CounterexampleFamily, j: int) -> list[float]:
    """2^{tl} ||w_l||_{L_p} at the borderline t, relative to its value at l = j+1 (all 1 ideally)."""
    t = borderline_smoothness(fam)
    values = [2.0 ** (t * l) * _factor_norms(fam, j, l) for l in _levels(j)]
    return [v / values[0] for v in values]


def norm_table(
    fam: CounterexampleFamily,
    s: float,
    q: float,
    scale: Literal["B", "F"] = "B",
    js: Optional[Sequence[int]] = None,
) -> list[tuple[int, float]]:
    js = list(js) if js is not None else list(range(fam.j_min, fam.j_max + 1))
    values = parallel_map(lambda j: counterexample_norm(fam, j, s, q, scale), js)
    return list(zip(js, values))


def fit_asymptotics(js: Sequence[float], norms: Sequence[float]) -> FitResult:
    """Least-squares line through (log j, log ||v_j||)."""
    if len(js) != len(norms) or len(js) < 4:
        raise DomainError("need at least four (j, norm) pairs")
    values = np.asarray(norms, dtype=float)
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise DomainError("norms must be finite and positive")
    x = np.log(np.asarray(js, dtype=float))
    y = np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return FitResult(slope=float(slope), intercept=float(intercept), residual=residual)


def write_norm_table(rows: Sequence[tuple[int, float]], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "norm"])
        for j, value in rows:
            writer.writerow([j, repr(float(value))])
    return path
