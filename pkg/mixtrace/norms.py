"""Quasi-norms: mixed L_p, L_p(l_q), F/B spaces, W/H Sobolev norms, homogeneous symbol norms, lift and Hardy."""
import logging
import math
from functools import lru_cache
from typing import Literal, Optional, Sequence

import numpy as np

from mixtrace.errors import DomainError, GridMismatchError, UnsupportedError, WindowError
from mixtrace.grid_field import (
    anisotropic_radius,
    coefficients,
    fourier_multiplier,
    frequency_mesh,
    l2_norm,
    spectral_derivative,
    synthesize,
)
from mixtrace.littlewood_paley import LPDecomposition, LPFamily, decompose, psi
from mixtrace.models import AnisotropyVector, ExponentVector, Grid, GridField, NormReport, SpaceParams

_LOG = logging.getLogger(__name__)

TAIL_TOL = 1e-6
WINDOW_TOL = 1e-14
_SHELL_FRACTION = 0.9


def _reduce(mag: np.ndarray, spacing: Sequence[float], p: Sequence[float]) -> float:
    """Iterated quadrature with array axis 0 (x_1) innermost."""
    arr = np.asarray(mag, dtype=float)
    for pk, dk in zip(p, spacing):
        if math.isinf(pk):
            arr = arr.max(axis=0)
        else:
            arr = (np.sum(arr ** pk, axis=0) * dk) ** (1.0 / pk)
    return float(arr)


def _check_dim(grid: Grid, p: ExponentVector) -> None:
    if p.n != grid.n:
        raise DomainError(f"{p.n} exponents for a {grid.n}-dimensional field")


def mixed_lp_array(values: np.ndarray, grid: Grid, p: ExponentVector) -> float:
    _check_dim(grid, p)
    return _reduce(np.abs(values), grid.spacing, p.p)


def mixed_lp_norm(u: GridField, p: ExponentVector) -> float:
    """||u||_{L_p}, x_1 innermost; p_k = inf is a max over that axis."""
    return mixed_lp_array(u.values, u.grid, p)


def _lq_pointwise(arrays: Sequence[np.ndarray], q: float, weights: Optional[Sequence[float]]) -> np.ndarray:
    weights = [1.0] * len(arrays) if weights is None else list(weights)
    acc = None
    for w, arr in zip(weights, arrays):
        mag = abs(w) * np.abs(arr)
        if acc is None:
            acc = mag.copy() if math.isinf(q) else mag ** q
        elif math.isinf(q):
            np.maximum(acc, mag, out=acc)
        else:
            acc += mag ** q
    return acc if math.isinf(q) else acc ** (1.0 / q)


def mixed_lp_lq_norm(
    seq: Sequence[GridField],
    p: ExponentVector,
    q: float,
    weights: Optional[Sequence[float]] = None,
) -> float:
    """||(sum_j |w_j u_j|^q)^{1/q}||_{L_p}."""
    if not seq:
        return 0.0
    grid = seq[0].grid
    if any(u.grid != grid for u in seq):
        raise GridMismatchError("sequence members live on different grids")
    _check_dim(grid, p)
    return _reduce(_lq_pointwise([u.values for u in seq], q, weights), grid.spacing, p.p)


def lq(values: Sequence[float], q: float) -> float:
    arr = np.abs(np.asarray(values, dtype=float))
    if arr.size == 0:
        return 0.0
    if math.isinf(q):
        return float(arr.max())
    return float(np.sum(arr ** q) ** (1.0 / q))


def space_quasi_norm(
    u: GridField,
    sp: SpaceParams,
    fam: LPFamily,
    decomposition: Optional[LPDecomposition] = None,
) -> NormReport:
    """F: l_q of 2^{js}|u_j| inside L_p; B: L_p norms of 2^{js}u_j inside l_q."""
    if sp.scale not in ("F", "B"):
        raise UnsupportedError(f"space_quasi_norm handles F and B scales, got {sp.scale}")
    if sp.scale == "F" and not sp.p.finite:
        raise UnsupportedError("F scale needs finite integrability exponents")
    if tuple(sp.a.a) != tuple(fam.a.a):
        raise DomainError(f"space anisotropy {sp.a.a} differs from family anisotropy {fam.a.a}")
    d = decomposition if decomposition is not None else decompose(u, fam)
    weights = [2.0 ** (j * sp.s) for j in d.indices]
    contributions = tuple(w * mixed_lp_norm(b, sp.p) for w, b in zip(weights, d.blocks))
    if sp.scale == "F":
        value = _reduce(_lq_pointwise([b.values for b in d.blocks], sp.q, weights), u.grid.spacing, sp.p.p)
    else:
        value = lq(contributions, sp.q)

    tail_ratio = contributions[-1] / value if value > 0 else 0.0
    size = l2_norm(u)
    remainder_ratio = l2_norm(d.remainder) / size if size > 0 else 0.0
    tail_ok = tail_ratio < TAIL_TOL and remainder_ratio < TAIL_TOL
    if not tail_ok:
        _LOG.info(
            "dyadic truncation not negligible",
            extra={"scale": sp.scale, "tail_ratio": tail_ratio, "remainder_ratio": remainder_ratio},
        )
    return NormReport(
        value=value,
        contributions=contributions,
        j_max=fam.j_max,
        tail_ratio=tail_ratio,
        remainder_ratio=remainder_ratio,
        tail_ok=tail_ok,
    )


def sobolev_norm_orders(u: GridField, p: ExponentVector, orders: Sequence[int]) -> float:
    """||u||_{L_p} + sum over axes with m_k > 0 of ||d^{m_k} u / dx_k^{m_k}||_{L_p}."""
    if len(orders) != u.n or any(m < 0 for m in orders):
        raise DomainError(f"need {u.n} nonnegative derivative orders, got {tuple(orders)}")
    total = mixed_lp_norm(u, p)
    for axis, m in enumerate(orders, start=1):
        if m > 0:
            total += mixed_lp_norm(spectral_derivative(u, axis, m), p)
    return total


def sobolev_norm(u: GridField, sp: SpaceParams) -> float:
    """W: derivatives of orders s/a_k; H: L_p norm of the Bessel potential Lambda_s u."""
    if sp.scale == "W":
        return sobolev_norm_orders(u, sp.p, sp.orders())
    if sp.scale == "H":
        return mixed_lp_norm(lift(u, sp.s, sp.a), sp.p)
    raise UnsupportedError(f"sobolev_norm handles W and H scales, got {sp.scale}")


def lift(u: GridField, r: float, a: AnisotropyVector) -> GridField:
    """Lambda_r = (1 + |xi|_a^2)^{r/2}(D)."""
    if r == 0:
        return u
    radius = anisotropic_radius(u.grid, a)
    return fourier_multiplier((1.0 + radius ** 2) ** (r / 2.0), u)


def _shell_energy(coeffs: np.ndarray, grid: Grid) -> float:
    mesh = frequency_mesh(grid)
    shell = np.zeros(grid.points, dtype=bool)
    for xi, nyq in zip(mesh, grid.nyquist):
        shell |= np.abs(xi) > _SHELL_FRACTION * nyq
    energy = np.abs(coeffs) ** 2
    total = float(energy.sum())
    return float(energy[shell].sum() / total) if total > 0 else 0.0


def _axis_points(nyquist: float, half_period: float) -> int:
    need = 2.0 * half_period * nyquist / math.pi
    return max(16, 1 << int(math.ceil(math.log2(need))))


@lru_cache(maxsize=32)
def phi0_lp_norm(a: AnisotropyVector, p: float) -> float:
    """||F^{-1} phi_0||_{L_p(R^n)} with phi_0 = psi(|.|_a) - psi(2|.|_a), by quadrature."""
    half = 16.0 * math.pi
    points = tuple(min(512, _axis_points(2.0 * 1.3 ** w, half)) for w in a.a)
    grid = Grid(half_periods=(half,) * a.n, points=points)
    r = anisotropic_radius(grid, a)
    phi0 = psi(r) - psi(2.0 * r)
    kernel = synthesize(grid, phi0 / grid.volume)
    return mixed_lp_norm(kernel, ExponentVector.uniform(a.n, p))


def symbol_homogeneous_besov_norm(
    b: GridField,
    s: float,
    p: float,
    q: float,
    fam: LPFamily,
    tol: float = WINDOW_TOL,
    low_tail: bool = True,
) -> float:
    """||b||_{homogeneous B^s_{p,q}} of a symbol sampled on its own grid.

    The window K_min..K_max covers every nonzero grid frequency. For a symbol with
    nonzero mean the terms k < K_min are added in closed form from ||F^{-1}phi_0||_p,
    which needs s + |a|(1 - 1/p) > 0.
    """
    if fam.flavor != "homogeneous":
        raise DomainError("symbol norms need a homogeneous family")
    if b.grid != fam.grid:
        raise GridMismatchError("symbol and family grids differ")
    if p <= 0 or q <= 0:
        raise DomainError("exponents must be positive")
    coeffs = coefficients(b)
    peak = float(np.abs(coeffs).max())
    if peak == 0.0:
        return 0.0

    shell = _shell_energy(coeffs, b.grid)
    if shell > tol:
        raise WindowError(
            f"symbol not resolved: {shell:.3e} of its energy sits in the outer Nyquist shell "
            f"(tolerance {tol:.1e}); refine the symbol grid"
        )

    pvec = ExponentVector.uniform(b.n, p)
    d = decompose(b, fam)
    terms = [2.0 ** (k * s) * mixed_lp_norm(block, pvec) for k, block in zip(d.indices, d.blocks)]
    total_q = lq(terms, q) if math.isinf(q) else float(np.sum(np.asarray(terms) ** q))

    mean = coeffs.flat[0]
    if low_tail and abs(mean) > 1e-12 * peak:
        decay = s + fam.a.total * (1.0 - 1.0 / p)
        if decay <= 0:
            raise WindowError(
                f"symbol with nonzero mean has infinite homogeneous norm at low frequencies "
                f"(s + |a|(1 - 1/p) = {decay:.4g} <= 0)"
            )
        lead = abs(mean) * b.grid.volume * phi0_lp_norm(fam.a, p)
        first = 2.0 ** ((fam.j_min - 1) * decay) * lead
        if math.isinf(q):
            total_q = max(total_q, first)
        else:
            total_q += first ** q / (1.0 - 2.0 ** (-decay * q))
        _LOG.debug("added low-frequency tail", extra={"k_min": fam.j_min, "lead": lead})

    return total_q if math.isinf(q) else total_q ** (1.0 / q)


HardyDirection = Literal["tail", "head"]


def hardy_smoothing(
    b: Sequence[complex],
    s: float,
    q: float,
    r: float,
    direction: HardyDirection = "tail",
) -> tuple[float, float]:
    """Both sides of the discrete Hardy inequality.

    tail: ||2^{sj}(sum_{k>=j}|b_k|^r)^{1/r}||_{l_q} vs ||2^{sj} b_j||_{l_q};
    head: the same with 2^{-sj} and sums over k <= j.
    """
    if s <= 0:
        raise DomainError("Hardy smoothing needs s > 0")
    mags = np.abs(np.asarray(b, dtype=complex))
    if mags.size == 0:
        return 0.0, 0.0
    j = np.arange(mags.size)
    sign = 1.0 if direction == "tail" else -1.0
    weights = 2.0 ** (sign * s * j)
    if math.isinf(r):
        partial = np.maximum.accumulate(mags[::-1])[::-1] if direction == "tail" else np.maximum.accumulate(mags)
    else:
        powers = mags ** r
        sums = np.cumsum(powers[::-1])[::-1] if direction == "tail" else np.cumsum(powers)
        partial = sums ** (1.0 / r)
    return lq(weights * partial, q), lq(weights * mags, q)


def hardy_constant(s: float, q: float, r: float) -> float:
    """(1 - 2^{-s tau})^{-1/tau} with tau = min(1, q, r)."""
    tau = min(1.0, q, r)
    return (1.0 - 2.0 ** (-s * tau)) ** (-1.0 / tau)
