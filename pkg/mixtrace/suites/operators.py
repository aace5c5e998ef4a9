"""Suites for maximal inequalities, the pointwise estimate of b(D) and the vector-valued multiplier bound."""
import logging
import math

import numpy as np

from mixtrace.errors import ConfigError
from mixtrace.grid_field import fourier_multiplier, sample
from mixtrace.littlewood_paley import build_family, decompose
from mixtrace.maximal import directional_maximal, iterated_maximal, peetre_maximal
from mixtrace.models import AnisotropyVector, Grid, GridField, MaximalParams, SuiteConfig
from mixtrace.norms import mixed_lp_lq_norm, symbol_homogeneous_besov_norm
from mixtrace.suites.common import (
    SuiteOutcome,
    as_float,
    check_band,
    covering_family,
    ensemble_size,
    option,
    ratio_case,
    require_grid,
    require_params,
    tolerance,
)
from mixtrace.suites.ensembles import band_limited, band_limited_box, mixed_ensemble, rng_for
from mixtrace.suites.registry import register

_LOG = logging.getLogger(__name__)


def _bump(rho: np.ndarray) -> np.ndarray:
    """exp(1 - 1/(1 - rho)) on rho < 1, zero outside; equals 1 at rho = 0."""
    out = np.zeros_like(rho, dtype=float)
    inside = rho < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - rho[inside]))
    return out


def _rho(a: AnisotropyVector, xi, radius: float) -> np.ndarray:
    """sum_k xi_k^2 / radius^{2 a_k}; below 1 exactly on |xi|_a < radius."""
    return sum(np.asarray(x, dtype=float) ** 2 / radius ** (2.0 * w) for x, w in zip(xi, a.a))


def _exponent_list(cfg: SuiteConfig, key: str, default: list) -> tuple[float, ...]:
    return tuple(as_float(x) for x in option(cfg, key, default))


@register("bagby", "||M_n u_j||_{L_p(l_q)} <= c ||u_j||_{L_p(l_q)} for 1 < p_n < inf and 1 < q, p_k <= inf")
def bagby(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    sp = require_params(cfg)
    p, q = sp.p, sp.q
    if not 1.0 < p.p[-1] < math.inf:
        raise ConfigError(f"Bagby's inequality needs 1 < p_n < inf, got p_n = {p.p[-1]}")
    if q <= 1.0 or any(pk <= 1.0 for pk in p.p):
        raise ConfigError("Bagby's inequality needs q > 1 and p_k > 1")
    radius = float(option(cfg, "radius", 8))
    check_band(grid, sp.a, radius)
    bound = tolerance(cfg, "constant", 8.0)
    fam = covering_family(sp.a, grid, radius)
    out = SuiteOutcome(declared_constant=bound)
    for case_id, u in mixed_ensemble(grid, sp.a, radius, ensemble_size(cfg), cfg.seed, "bagby"):
        blocks = decompose(u, fam).blocks
        maximal = [directional_maximal(b, grid.n) for b in blocks]
        out.add(ratio_case(case_id, mixed_lp_lq_norm(maximal, p, q), mixed_lp_lq_norm(blocks, p, q), bound))
    return out


@register(
    "peetre",
    "u*(r, b; x) <= c iterated maximal function for supp F u in Q_b; ||u_j*(r, b^j)||_{L_p(l_q)} <= c ||u_j||_{L_p(l_q)}",
)
def peetre(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    sp = require_params(cfg)
    r = _exponent_list(cfg, "r", [1] * grid.n)
    if len(r) != grid.n:
        raise ConfigError("one Peetre exponent per axis")
    for k, rk in enumerate(r):
        if not rk < min(*sp.p.p[: k + 1], sp.q):
            raise ConfigError(f"need r_k < min(p_1..p_k, q) on axis {k + 1}, got r = {r}")
    radius = float(option(cfg, "radius", 8))
    check_band(grid, sp.a, radius)
    bound = tolerance(cfg, "constant", 16.0)
    pointwise_bound = tolerance(cfg, "pointwise", 32.0)
    fam = covering_family(sp.a, grid, radius)
    out = SuiteOutcome(declared_constant=bound)

    for case_id, u in mixed_ensemble(grid, sp.a, radius, ensemble_size(cfg), cfg.seed, "peetre"):
        d = decompose(u, fam)
        starred = []
        for j, block in zip(d.indices, d.blocks):
            outer = fam.corona(j)[1]
            scales = tuple(outer ** w for w in sp.a.a)
            starred.append(peetre_maximal(block, MaximalParams(t=r, b=scales)))
        out.add(ratio_case(case_id, mixed_lp_lq_norm(starred, sp.p, sp.q), mixed_lp_lq_norm(d.blocks, sp.p, sp.q), bound))

    for side in option(cfg, "box_sides", [2, 4]):
        halfwidths = tuple(float(side) ** w for w in sp.a.a)
        check_band(grid, AnisotropyVector.isotropic(grid.n), max(halfwidths))
        for i in range(ensemble_size(cfg)):
            u = band_limited_box(grid, halfwidths, rng_for(cfg.seed, "box", side, i))
            starred = peetre_maximal(u, MaximalParams(t=r, b=halfwidths))
            majorant = iterated_maximal(u, MaximalParams(t=r))
            ratio = float(np.max(np.abs(starred.values) / np.abs(majorant.values)))
            out.add(ratio_case(f"box{side}-{i}", ratio, 1.0, pointwise_bound, group="pointwise"))
    return out


def marschall_symbol(a: AnisotropyVector, radius: float, tilt: float):
    """b(xi) = bump(|xi|_a / A) (1 + c xi_1 / A^{a_1}), supported in the ball of radius A."""
    def _symbol(xi) -> np.ndarray:
        rho = _rho(a, xi, radius)
        return _bump(rho) * (1.0 + tilt * np.asarray(xi[0], dtype=float) / radius ** a.a[0])
    return _symbol


def _symbol_grid(a: AnisotropyVector, radius: float, points: int) -> Grid:
    return Grid(half_periods=tuple(4.0 * radius ** w for w in a.a), points=(points,) * a.n)


def _check_marschall_exponents(t: tuple[float, ...], n: int) -> None:
    if len(t) != n or any(not 0.0 < tk <= 1.0 for tk in t):
        raise ConfigError(f"need 0 < t_k <= 1 on each of {n} axes, got {t}")


@register(
    "marschall",
    "|b(D)u(x)| <= c (RA)^{a.(1/t) - |a|} ||b||_{homogeneous B^{a.(1/t)}_{1,d}} (M_n(...(M_1|u|^{t_1})^{t_2/t_1}...)^{1/t_n})(x)",
)
def marschall(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    a = cfg.params.a if cfg.params is not None else AnisotropyVector.isotropic(grid.n)
    bound = tolerance(cfg, "constant", 8.0)
    window_tol = tolerance(cfg, "window", 1e-6)
    points = int(option(cfg, "symbol_points", 512))
    size = ensemble_size(cfg, default=8)
    out = SuiteOutcome(declared_constant=bound)

    for values in option(cfg, "t_values", [[1] * grid.n, [0.5] + [1] * (grid.n - 1)]):
        t = tuple(as_float(x) for x in values)
        _check_marschall_exponents(t, grid.n)
        d = min(1.0, *t)
        s_b = float(sum(w / tk for w, tk in zip(a.a, t)))
        t_tag = "t" + "-".join(f"{x:g}" for x in t)
        for A in option(cfg, "symbol_radii", [1, 2]):
            A = float(A)
            sgrid = _symbol_grid(a, A, points)
            sfam = build_family(a, sgrid, flavor="homogeneous")
            for tilt in option(cfg, "tilts", [0.0, 0.5]):
                sym = marschall_symbol(a, A, float(tilt))
                b = sample(sgrid, lambda *x: sym(x))
                norm = symbol_homogeneous_besov_norm(b, s_b, 1.0, d, sfam, tol=window_tol)
                for R in option(cfg, "spectral_ratios", [1, 2]):
                    R = float(R)
                    check_band(grid, a, A * R)
                    scale = (R * A) ** (s_b - a.total)
                    for i in range(size):
                        u = band_limited(grid, a, A * R, rng_for(cfg.seed, t_tag, A, tilt, R, i))
                        image = fourier_multiplier(sym, u)
                        majorant = iterated_maximal(u, MaximalParams(t=t))
                        lhs = float(np.max(np.abs(image.values) / np.abs(majorant.values)))
                        out.add(ratio_case(f"{t_tag}-A{A:g}-c{tilt:g}-R{R:g}-{i}", lhs, scale * norm, bound))
    return out


@register(
    "help1-multiplier",
    "||F^{-1}[phi(2^{-ja}.) F u_j]||_{L_p(l_q)} <= c R^{a.(1/t) - |a|} ||u_j||_{L_p(l_q)} for supp F u_j in |xi|_a <= R 2^j",
)
def help1_multiplier(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    sp = require_params(cfg)
    t = _exponent_list(cfg, "t", [0.9] * grid.n)
    for k, tk in enumerate(t):
        if not 0.0 < tk < min(1.0, *sp.p.p[: k + 1], sp.q):
            raise ConfigError(f"need 0 < t_k < min(1, p_1..p_k, q) on axis {k + 1}, got t = {t}")
    levels = int(option(cfg, "levels", 3))
    bound = tolerance(cfg, "constant", 8.0)
    gain = float(sum(w / tk for w, tk in zip(sp.a.a, t))) - sp.a.total
    out = SuiteOutcome(declared_constant=bound)

    def _cut(j: int):
        return lambda xi: _bump(_rho(sp.a, xi, 2.0 * 2.0 ** j))

    for R in option(cfg, "spectral_ratios", [1, 2]):
        R = float(R)
        check_band(grid, sp.a, R * 2.0 ** levels)
        for i in range(ensemble_size(cfg)):
            rng = rng_for(cfg.seed, "help1", R, i)
            seq: list[GridField] = [band_limited(grid, sp.a, R * 2.0 ** j, rng) for j in range(1, levels + 1)]
            images = [fourier_multiplier(_cut(j), u) for j, u in zip(range(1, levels + 1), seq)]
            lhs = mixed_lp_lq_norm(images, sp.p, sp.q)
            rhs = R ** gain * mixed_lp_lq_norm(seq, sp.p, sp.q)
            out.add(ratio_case(f"R{R:g}-{i}", lhs, rhs, bound))
    return out

