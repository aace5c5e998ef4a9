"""Trace estimates on x_1 = 0 and x_n = 0 and the right-inverse property of the extension operators."""
import logging
import math

import numpy as np

from mixtrace.errors import ConfigError
from mixtrace.grid_field import combine, l2_norm, restrict_hyperplane
from mixtrace.littlewood_paley import LPFamily, build_family, decompose, nyquist_radius
from mixtrace.models import AnisotropyVector, ExponentVector, ExtensionFamily, Grid, GridField, SpaceParams, SuiteConfig, TraceSpec
from mixtrace.norms import lq, mixed_lp_lq_norm, mixed_lp_norm, space_quasi_norm
from mixtrace.suites.common import (
    SuiteOutcome,
    as_float,
    check_band,
    covering_family,
    ensemble_size,
    error_case,
    option,
    ratio_case,
    require_grid,
    require_params,
    tolerance,
)
from mixtrace.suites.ensembles import mixed_ensemble
from mixtrace.suites.registry import register
from mixtrace.trace_ext import admissible, build_extension_family, cauchy_trace, extend, extend_cauchy, minimum_axis_grid, trace

_LOG = logging.getLogger(__name__)

_AXIS_HEADROOM = 1.25


def _trace_params(cfg: SuiteConfig, n: int) -> SpaceParams:
    if cfg.params is not None:
        return cfg.params
    return SpaceParams(s=1.0, a=AnisotropyVector.isotropic(n), p=ExponentVector.uniform(n, 2.0), q=2.0)


def _slice_quantity(blocks: list[GridField], sp: SpaceParams, axis: int, index: int) -> float:
    """Axis 1: ||(sum_j |2^{sigma j} u_j(0, .)|^{p_1})^{1/p_1}||_{L_p''}; axis n: l_{p_n} of 2^{sigma j}||u_j(., 0)||_{L_p'}."""
    k = axis - 1
    sigma = sp.s - sp.a.a[k] / sp.p.p[k]
    weights = [2.0 ** (sigma * j) for j in range(len(blocks))]
    slices = [restrict_hyperplane(b, axis, index) for b in blocks]
    rest = sp.p.without(axis)
    if axis == 1:
        return mixed_lp_lq_norm(slices, rest, sp.p.p[0], weights=weights)
    return lq([w * mixed_lp_norm(s, rest) for w, s in zip(weights, slices)], sp.p.p[-1])


def _trace_suite(cfg: SuiteConfig, every_slice: bool) -> SuiteOutcome:
    grid = require_grid(cfg)
    sp = _trace_params(cfg, grid.n)
    radius = float(option(cfg, "radius", 8))
    check_band(grid, sp.a, radius)
    bound = tolerance(cfg, "constant", 8.0)
    fam = covering_family(sp.a, grid, radius)
    for axis in (1, grid.n):
        verdict = admissible(sp, TraceSpec(axis=axis))
        if not verdict.admissible:
            raise ConfigError(f"s = {sp.s:g} is not admissible for the trace on x_{axis} = 0 (bound {verdict.bound})")
    out = SuiteOutcome(declared_constant=bound)
    groups = {1: "main", grid.n: "outer"}

    for axis, group in groups.items():
        stride = int(option(cfg, "slice_stride", 4))
        centre = grid.points[axis - 1] // 2
        indices = range(0, grid.points[axis - 1], stride) if every_slice else [centre]
        for case_id, u in mixed_ensemble(grid, sp.a, radius, ensemble_size(cfg), cfg.seed, f"trace{axis}", fixed={axis: 0.0}):
            d = decompose(u, fam)
            blocks = list(d.blocks)
            lhs = max(_slice_quantity(blocks, sp, axis, i) for i in indices)
            rhs = space_quasi_norm(u, sp, fam, d).value
            out.add(ratio_case(f"x{axis}-{case_id}", lhs, rhs, bound, group=group))
    return out


@register(
    "trace-basic",
    "||(sum_j |2^{(s - a_1/p_1) j} u_j(0, .)|^{p_1})^{1/p_1}||_{L_p''} <= c ||u||_{F^{s,a}_{p,q}}, and the B-type bound on x_n = 0",
)
def trace_basic(cfg: SuiteConfig) -> SuiteOutcome:
    return _trace_suite(cfg, every_slice=False)


@register("trace-sup-slices", "the basic trace bound holds uniformly over slices x_k = z")
def trace_sup_slices(cfg: SuiteConfig) -> SuiteOutcome:
    return _trace_suite(cfg, every_slice=True)


# --- right inverses -----------------------------------------------------------


def _tangential_family(cfg: SuiteConfig, tgrid: Grid, a_t: AnisotropyVector) -> tuple[LPFamily, float]:
    radius = min(float(option(cfg, "tangential_radius", 6)), 0.5 * nyquist_radius(tgrid, a_t))
    return covering_family(a_t, tgrid, radius), radius


def _axis_grid(cfg: SuiteConfig, efam: ExtensionFamily, j_top: int) -> tuple[float, int]:
    """Extension axis (L, N): the configured size raised to what the top dilate needs."""
    need_half, need_points = minimum_axis_grid(efam, j_top)
    half = max(float(option(cfg, "axis_half_period", 8 * math.pi)), need_half)
    top = (efam.bump_center + efam.bump_halfwidth) * 2.0 ** (j_top * efam.weight)
    wanted = 2.0 * half / math.pi * top * _AXIS_HEADROOM
    points = max(int(option(cfg, "axis_points", 512)), need_points, 1 << int(math.ceil(math.log2(wanted))))
    return half, points


def _relative(a: GridField, b: GridField) -> float:
    size = l2_norm(b)
    return l2_norm(combine([a, b], [1.0, -1.0])) / size if size > 0 else l2_norm(a)


def _check_tangential(tgrid: Grid, sp: SpaceParams) -> None:
    if tgrid.n != sp.n - 1:
        raise ConfigError(f"right-inverse suites take the tangential grid: need dimension {sp.n - 1}, got {tgrid.n}")


@register("trace-rightinv", "gamma_{nu,k} K_{nu,k} v = v, and ||K_{0,1} v||_{F^{s,a}_{p,q}} <= c ||v||_{F^{s - a_1/p_1, a''}_{p'',p_1}}")
def trace_rightinv(cfg: SuiteConfig) -> SuiteOutcome:
    tgrid = require_grid(cfg)
    sp = require_params(cfg)
    _check_tangential(tgrid, sp)
    n = sp.n
    top_order = int(option(cfg, "max_order", 3))
    identity_tol = tolerance(cfg, "identity", 1e-8)
    bound = tolerance(cfg, "constant", 64.0)
    size = ensemble_size(cfg, default=16)
    out = SuiteOutcome(declared_constant=bound, primary_group="bound")

    for axis in (1, n):
        a_t = sp.a.without(axis)
        tfam, radius = _tangential_family(cfg, tgrid, a_t)
        efam = build_extension_family(axis, top_order, weight=sp.a.a[axis - 1], seed=cfg.seed)
        half, points = _axis_grid(cfg, efam, tfam.j_max)
        full = tgrid.inserted(axis, half, points)
        full_fam = build_family(sp.a, full, j_max=2)
        for case_id, v in mixed_ensemble(tgrid, a_t, radius, size, cfg.seed, f"ext{axis}"):
            for nu in range(top_order + 1):
                w = extend(v, efam, tfam, half, points, nu)
                # the coarse full-grid family leaves most of w in the remainder; restrict all of it
                err = _relative(trace(w, TraceSpec(axis=axis, order=nu), full_fam, include_remainder=True), v)
                out.add(error_case(f"x{axis}-nu{nu}-{case_id}", err, identity_tol, group="identity"))

    # extension bound along x_1
    a_t = sp.a.without(1)
    p_t = sp.p.without(1)
    tfam, radius = _tangential_family(cfg, tgrid, a_t)
    efam = build_extension_family(1, 0, weight=sp.a.a[0], seed=cfg.seed)
    half, points = _axis_grid(cfg, efam, tfam.j_max)
    s_t = float(option(cfg, "trace_smoothness", 0.5))
    source = SpaceParams(s=s_t, a=a_t, p=p_t, q=sp.p.p[0], scale="F")
    for case_id, v in mixed_ensemble(tgrid, a_t, radius, size, cfg.seed, "bound"):
        rhs = space_quasi_norm(v, source, tfam).value
        w = extend(v, efam, tfam, half, points)
        fam = covering_family(sp.a, w.grid, w.support_cert.radius)
        d = decompose(w, fam)
        for q in option(cfg, "q_values", [0.5, 1, 2, "inf"]):
            q = as_float(q)
            target = SpaceParams(s=s_t + sp.a.a[0] / sp.p.p[0], a=sp.a, p=sp.p, q=q, scale="F")
            out.add(ratio_case(f"q{q:g}-{case_id}", space_quasi_norm(w, target, fam, d).value, rhs, bound, group="bound"))
    return out


@register(
    "cauchy-rightinv",
    "gamma_{j,k} K^{(m)}(v_0, ..., v_{m-1}) = v_j for j < m, with gamma_{j,k} K_{nu,k} = 0 for j != nu",
    refinable=False,
)
def cauchy_rightinv(cfg: SuiteConfig) -> SuiteOutcome:
    tgrid = require_grid(cfg)
    sp = require_params(cfg)
    _check_tangential(tgrid, sp)
    tol = tolerance(cfg, "identity", 1e-8)
    size = ensemble_size(cfg, default=4)
    out = SuiteOutcome(declared_constant=tol)

    for axis in (1, sp.n):
        a_t = sp.a.without(axis)
        tfam, radius = _tangential_family(cfg, tgrid, a_t)
        for m in option(cfg, "rows", [1, 2, 3]):
            m = int(m)
            efam = build_extension_family(axis, m - 1, weight=sp.a.a[axis - 1], seed=cfg.seed)
            half, points = _axis_grid(cfg, efam, tfam.j_max)
            full_fam = build_family(sp.a, tgrid.inserted(axis, half, points), j_max=2)
            for i in range(size):
                data = [v for _, v in mixed_ensemble(tgrid, a_t, radius, m, cfg.seed, f"cauchy{axis}-m{m}-{i}")]
                w = extend_cauchy(data, efam, tfam, half, points)
                traces = cauchy_trace(w, TraceSpec(axis=axis, order=0, m=m), full_fam, include_remainder=True)
                errors = [_relative(g, v) for g, v in zip(traces, data)]
                out.add(error_case(f"x{axis}-m{m}-{i}", float(np.max(errors)), tol))
                for nu, v in enumerate(data):
                    w_nu = extend(v, efam, tfam, half, points, nu)
                    for j in range(m):
                        if j == nu:
                            continue
                        leak = l2_norm(trace(w_nu, TraceSpec(axis=axis, order=j), full_fam, include_remainder=True)) / l2_norm(v)
                        out.add(error_case(f"x{axis}-m{m}-{i}-j{j}-nu{nu}", leak, tol, group="offdiag"))
    return out
