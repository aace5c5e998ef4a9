"""Suites for Nikol'skij, Littlewood-Paley, embedding, lift, reparametrisation, translation and Hardy inequalities."""
import logging
import math

import numpy as np

from mixtrace.borderlines import (
    besov_embedding_holds,
    bounded_continuous_threshold,
    exact,
    exact_or_inf,
    sobolev_embedding_smoothness,
)
from mixtrace.errors import ConfigError
from mixtrace.geometry import normalize_anisotropy
from mixtrace.grid_field import combine, l2_norm, translate
from mixtrace.littlewood_paley import decompose
from mixtrace.models import AnisotropyVector, ExponentVector, SpaceParams, SuiteConfig
from mixtrace.norms import hardy_constant, hardy_smoothing, lift, mixed_lp_lq_norm, mixed_lp_norm, space_quasi_norm
from mixtrace.suites.common import (
    SuiteOutcome,
    as_float,
    check_band,
    covering_family,
    ensemble_size,
    error_case,
    exponents,
    flag_case,
    option,
    ratio_case,
    require_grid,
    require_params,
    tolerance,
)
from mixtrace.suites.ensembles import LOCALIZED_CUTOFF, band_limited, localized, mixed_ensemble, random_point, rng_for
from mixtrace.suites.registry import register

_LOG = logging.getLogger(__name__)


def _anisotropy(cfg: SuiteConfig, n: int) -> AnisotropyVector:
    return cfg.params.a if cfg.params is not None else AnisotropyVector.isotropic(n)


def _check_increase(p: ExponentVector, r: ExponentVector, allow_inf: bool) -> None:
    if p.n != r.n:
        raise ConfigError("integrability vectors differ in dimension")
    if any(pk > rk for pk, rk in zip(p.p, r.p)):
        raise ConfigError(f"need p_k <= r_k on every axis, got p={p.p}, r={r.p}")
    if p.p == r.p:
        raise ConfigError("need r != p")
    if not allow_inf and not r.finite:
        raise ConfigError("this inequality needs finite r")


def _gain(a: AnisotropyVector, p: ExponentVector, r: ExponentVector) -> float:
    """a . (1/p - 1/r)."""
    return float(sum(w * (1.0 / pk - 1.0 / rk) for w, pk, rk in zip(a.a, p.p, r.p)))


@register(
    "nikolskij",
    "||(sum_j |f_j|^q)^{1/q}||_{L_r} <= c ||sup_j R^{j a.(1/p - 1/r)} |f_j| ||_{L_p} for supp F f_j in |xi|_a <= R^j",
)
def nikolskij(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    a = _anisotropy(cfg, grid.n)
    p = exponents(option(cfg, "p", [1] * grid.n))
    r = exponents(option(cfg, "r", [2] * grid.n))
    _check_increase(p, r, allow_inf=False)
    q = as_float(option(cfg, "q", 2))
    bound = tolerance(cfg, "constant", 4.0)
    gain = _gain(a, p, r)
    size = ensemble_size(cfg)
    out = SuiteOutcome(declared_constant=bound)

    # single functions: the ratio must not drift with the band radius
    maxima = []
    for radius in option(cfg, "radii", [2, 4, 8]):
        check_band(grid, a, radius)
        worst = 0.0
        for case_id, f in mixed_ensemble(grid, a, radius, size, cfg.seed, f"R{radius}"):
            case = out.add(ratio_case(case_id, mixed_lp_norm(f, r), radius ** gain * mixed_lp_norm(f, p), bound))
            worst = max(worst, case.ratio)
        maxima.append(worst)
    out.add(ratio_case("radius-spread", max(maxima), min(maxima), tolerance(cfg, "spread", 2.0), group="spread"))

    # sequences f_j with supp F f_j in |xi|_a <= base^j
    base = float(option(cfg, "base", 2))
    levels = int(option(cfg, "levels", 3))
    check_band(grid, a, base ** levels)
    weights = [base ** (j * gain) for j in range(levels + 1)]
    for i in range(size):
        rng = rng_for(cfg.seed, "sequence", i)
        center = random_point(grid, rng)
        seq = []
        for j, w in enumerate(weights):
            radius = base ** j
            if i % 2 == 0:
                g = band_limited(grid, a, radius, rng)
            else:
                g = localized(grid, a, radius / LOCALIZED_CUTOFF, center, amplitude=complex(*rng.standard_normal(2)))
            seq.append(combine([g], [1.0 / w]))
        lhs = mixed_lp_lq_norm(seq, r, q)
        rhs = mixed_lp_lq_norm(seq, p, math.inf, weights=weights)
        out.add(ratio_case(f"sequence-{i}", lhs, rhs, bound, group="sequence"))
    return out


@register("lwp", "c1 ||u||_{L_p} <= ||(sum_j |Phi_j(D) u|^2)^{1/2}||_{L_p} <= c2 ||u||_{L_p} for 1 < p < inf")
def littlewood_paley(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    a = _anisotropy(cfg, grid.n)
    radius = float(option(cfg, "radius", 8))
    check_band(grid, a, radius)
    bound = tolerance(cfg, "constant", 4.0)
    fam = covering_family(a, grid, radius)
    out = SuiteOutcome(declared_constant=bound)
    fields = mixed_ensemble(grid, a, radius, ensemble_size(cfg), cfg.seed, "lwp")
    for values in option(cfg, "p_values", [[2] * grid.n, [1.5] + [3] * (grid.n - 1)]):
        p = exponents(values)
        if any(not 1.0 < pk < math.inf for pk in p.p):
            raise ConfigError(f"Littlewood-Paley inequality needs 1 < p_k < inf, got {p.p}")
        tag = "p" + "-".join(f"{x:g}" for x in p.p)
        for case_id, u in fields:
            blocks = decompose(u, fam).blocks
            out.add(ratio_case(f"{tag}-{case_id}", mixed_lp_lq_norm(blocks, p, 2.0), mixed_lp_norm(u, p), bound, two_sided=True))
    return out


@register("embed-F", "F^{s,a}_{p,q1} embeds in F^{t,a}_{r,q2} for p <= r, r != p, t = s - a.(1/p - 1/r); F^{s} in C_b for s > a.(1/p)")
def embed_f(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    sp = require_params(cfg)
    if not sp.p.finite:
        raise ConfigError("the F-scale embedding needs finite p")
    r = exponents(option(cfg, "r", [2] * grid.n))
    _check_increase(sp.p, r, allow_inf=False)
    q2 = as_float(option(cfg, "q2", sp.q))
    radius = float(option(cfg, "radius", 8))
    check_band(grid, sp.a, radius)
    bound = tolerance(cfg, "constant", 4.0)
    t = sp.s - _gain(sp.a, sp.p, r)
    target = SpaceParams(s=t, a=sp.a, p=r, q=q2, scale="F")
    threshold = float(bounded_continuous_threshold([exact(w) for w in sp.a.a], [exact(x) for x in sp.p.p]))
    continuous = sp.model_copy(update={"s": threshold + float(option(cfg, "continuity_margin", 0.5))})
    fam = covering_family(sp.a, grid, radius)
    out = SuiteOutcome(declared_constant=bound)

    for case_id, u in mixed_ensemble(grid, sp.a, radius, ensemble_size(cfg), cfg.seed, "embed"):
        d = decompose(u, fam)
        out.add(ratio_case(case_id, space_quasi_norm(u, target, fam, d).value, space_quasi_norm(u, sp, fam, d).value, bound))
        sup = float(np.abs(u.values).max())
        out.add(ratio_case(f"cb-{case_id}", sup, space_quasi_norm(u, continuous, fam, d).value, bound, group="bounded"))

    a_x = [exact(w) for w in sp.a.a]
    t_exact = sobolev_embedding_smoothness(exact(sp.s), a_x, [exact(x) for x in sp.p.p], [exact_or_inf(x) for x in r.p])
    out.add(flag_case("target-smoothness", abs(float(t_exact) - t) < 1e-12, group="calculator", note=f"t = {t_exact}"))
    return out


@register("embed-B", "B^{s,a}_{p,q1} embeds in B^{t,a}_{r,q2} for p <= r, t - a.(1/r) <= s - a.(1/p), q1 <= q2 on equality")
def embed_b(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    sp = require_params(cfg).model_copy(update={"scale": "B"})
    r = exponents(option(cfg, "r", ["inf"] * grid.n))
    _check_increase(sp.p, r, allow_inf=True)
    q2 = as_float(option(cfg, "q2", sp.q))
    if q2 < sp.q:
        raise ConfigError("the equality case needs q1 <= q2")
    radius = float(option(cfg, "radius", 8))
    check_band(grid, sp.a, radius)
    bound = tolerance(cfg, "constant", 4.0)
    t = sp.s - _gain(sp.a, sp.p, r)
    target = SpaceParams(s=t, a=sp.a, p=r, q=q2, scale="B")
    fam = covering_family(sp.a, grid, radius)
    out = SuiteOutcome(declared_constant=bound)

    for case_id, u in mixed_ensemble(grid, sp.a, radius, ensemble_size(cfg), cfg.seed, "embed"):
        d = decompose(u, fam)
        out.add(ratio_case(case_id, space_quasi_norm(u, target, fam, d).value, space_quasi_norm(u, sp, fam, d).value, bound))

    holds = besov_embedding_holds(
        exact(sp.s), [exact(x) for x in sp.p.p], exact_or_inf(sp.q),
        exact(t), [exact_or_inf(x) for x in r.p], exact_or_inf(q2), [exact(w) for w in sp.a.a],
    )
    out.add(flag_case("calculator-agrees", holds, group="calculator"))
    return out


@register("lift", "Lambda_r = (1 + |xi|_a^2)^{r/2}(D) maps F^{s,a}_{p,q} onto F^{s-r,a}_{p,q} with inverse Lambda_{-r}")
def lift_suite(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    sp = require_params(cfg)
    radius = float(option(cfg, "radius", 8))
    check_band(grid, sp.a, radius)
    orders = [as_float(x) for x in option(cfg, "orders", [-2, -0.5, 1, 3])]
    identity_tol = tolerance(cfg, "identity", 1e-10)
    fam = covering_family(sp.a, grid, radius)
    out = SuiteOutcome(declared_constant=max(2.0 ** (abs(r) + 2) for r in orders))

    for case_id, u in mixed_ensemble(grid, sp.a, radius, ensemble_size(cfg), cfg.seed, "lift"):
        base = space_quasi_norm(u, sp, fam).value
        size = l2_norm(u)
        for r in orders:
            lifted = lift(u, r, sp.a)
            back = lift(lifted, -r, sp.a)
            err = l2_norm(combine([back, u], [1.0, -1.0])) / size
            out.add(error_case(f"r{r:g}-{case_id}", err, identity_tol, group="identity"))
            shifted = sp.model_copy(update={"s": sp.s - r})
            out.add(ratio_case(
                f"r{r:g}-{case_id}", space_quasi_norm(lifted, shifted, fam).value, base,
                2.0 ** (abs(r) + 2), two_sided=True,
            ))
    return out


@register("scaling", "F^{s,a}_{p,q} = F^{lambda s, lambda a}_{p,q} with equivalent quasi-norms for lambda > 0")
def scaling(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    sp = require_params(cfg)
    radius = float(option(cfg, "radius", 8))
    check_band(grid, sp.a, radius)
    lambdas = [as_float(x) for x in option(cfg, "lambdas", [0.5, 2, 3])]
    raw_scale = as_float(option(cfg, "raw_scale", 2))

    def _bound(lam: float) -> float:
        return 4.0 * 2.0 ** (abs(sp.s) * max(lam, 1.0 / lam))

    out = SuiteOutcome(declared_constant=max(_bound(lam) for lam in lambdas + [raw_scale]))
    fam = covering_family(sp.a, grid, radius)
    rescaled = []
    for lam in lambdas:
        b = sp.a.scaled(lam)
        rescaled.append((lam, sp.model_copy(update={"s": lam * sp.s, "a": b}), covering_family(b, grid, radius ** (1.0 / lam))))

    # a raw vector mu*a normalized back to min(a) = 1 must return lambda = 1/mu
    raw = sp.a.scaled(raw_scale)
    normalized, lam_n = normalize_anisotropy(raw, "min_one")
    smallest = min(sp.a.a)
    out.add(flag_case(
        "normalize-anisotropy",
        abs(lam_n * raw_scale * smallest - 1.0) < 1e-12 and np.allclose(normalized.as_array() * smallest, sp.a.as_array(), rtol=1e-12),
        group="normalize",
        note=f"lambda = {lam_n:.6g}",
    ))
    raw_sp = sp.model_copy(update={"s": raw_scale * sp.s, "a": raw})
    raw_fam = covering_family(raw, grid, radius ** (1.0 / raw_scale))
    norm_sp = sp.model_copy(update={"s": lam_n * raw_sp.s, "a": normalized})
    norm_fam = covering_family(normalized, grid, radius ** (1.0 / (raw_scale * lam_n)))

    for case_id, u in mixed_ensemble(grid, sp.a, radius, ensemble_size(cfg), cfg.seed, "scaling"):
        base = space_quasi_norm(u, sp, fam).value
        for lam, scaled_sp, scaled_fam in rescaled:
            out.add(ratio_case(f"lambda{lam:g}-{case_id}", space_quasi_norm(u, scaled_sp, scaled_fam).value, base, _bound(lam), two_sided=True))
        out.add(ratio_case(
            f"normalized-{case_id}",
            space_quasi_norm(u, norm_sp, norm_fam).value,
            space_quasi_norm(u, raw_sp, raw_fam).value,
            _bound(raw_scale),
            group="normalize",
            two_sided=True,
        ))
    return out


_HARDY_SETTINGS = [[1, 1, 1], [1, "inf", 1], [0.5, 2, 1], [1, 2, 0.5], [2, 0.5, 2]]


@register(
    "translation",
    "||tau_h u - u|| in F^{s,a}_{p,q} and B^{s,a}_{p,q} decreases to 0 along h = 2^{-m} h_0 for q < inf",
)
def translation(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    sp = require_params(cfg)
    if math.isinf(sp.q):
        raise ConfigError("translation continuity needs finite q")
    radius = float(option(cfg, "radius", 8))
    check_band(grid, sp.a, radius)
    levels = int(option(cfg, "levels", 6))
    # |xi . h_0| <= pi on the band, so |e^{i 2^-m xi.h_0} - 1| <= (pi/2) 2^-m |e^{i xi.h_0} - 1|
    h0 = [math.pi / (grid.n * radius ** w) for w in sp.a.a]
    hilbert = all(x == 2.0 for x in sp.p.p) and sp.q == 2.0
    bound = tolerance(cfg, "constant", math.pi / 2 if hilbert else 2 * math.pi)
    out = SuiteOutcome(declared_constant=bound, informational_groups=() if hilbert else ("monotone",))
    fam = covering_family(sp.a, grid, radius)
    scales = ("F", "B") if sp.p.finite else ("B",)

    for case_id, u in mixed_ensemble(grid, sp.a, radius, ensemble_size(cfg), cfg.seed, "translation"):
        for scale in scales:
            target = sp.model_copy(update={"scale": scale})
            values = []
            for m in range(levels + 1):
                shifted = translate(u, [2.0 ** -m * h for h in h0])
                values.append(space_quasi_norm(combine([shifted, u], [1.0, -1.0]), target, fam).value)
            decreasing = all(later < earlier for earlier, later in zip(values, values[1:]))
            out.add(flag_case(f"{scale}-{case_id}", decreasing, group="monotone", note=f"{values[0]:.4g} -> {values[-1]:.4g}"))
            out.add(ratio_case(f"{scale}-{case_id}", 2.0 ** levels * values[-1], values[0], bound))
    if not hilbert:
        out.notes.append("monotonicity is exact only for p = (2, ..., 2), q = 2; reported as information here")
    return out


@register(
    "hardy",
    "||2^{sj}(sum_{k>=j}|b_k|^r)^{1/r}||_{l_q} <= c ||2^{sj} b_j||_{l_q} and the mirrored bound for 2^{-sj}, sums over k <= j",
    refinable=False,
)
def hardy(cfg: SuiteConfig) -> SuiteOutcome:
    settings = [tuple(as_float(x) for x in row) for row in option(cfg, "settings", _HARDY_SETTINGS)]
    length = int(option(cfg, "length", 24))
    exact_tol = tolerance(cfg, "exact", 1e-12)
    out = SuiteOutcome(declared_constant=max(hardy_constant(s, q, r) for s, q, r in settings))

    lhs, rhs = hardy_smoothing([1.0] + [0.0] * (length - 1), 1.0, 1.0, 1.0, "tail")
    out.add(error_case("unit-impulse", max(abs(lhs - 1.0), abs(rhs - 1.0)), exact_tol, group="exact"))
    lhs, rhs = hardy_smoothing([4.0 ** (-j) for j in range(21)], 1.0, math.inf, 1.0, "tail")
    out.add(error_case("geometric-quarter", max(abs(lhs - 4.0 / 3.0), abs(rhs - 1.0)), exact_tol, group="exact"))

    for s, q, r in settings:
        c = hardy_constant(s, q, r)
        tag = f"s{s:g}-q{q:g}-r{r:g}"
        for direction in ("tail", "head"):
            sign = -1.0 if direction == "tail" else 1.0
            for i in range(ensemble_size(cfg)):
                rng = rng_for(cfg.seed, tag, direction, i)
                j = np.arange(length)
                if i % 2 == 0:
                    b = (rng.standard_normal(length) + 1j * rng.standard_normal(length)) * 2.0 ** (sign * s * j)
                else:
                    # geometric profiles sit closest to the extremal sequences
                    rate = s * float(rng.uniform(0.05, 2.0))
                    b = 2.0 ** (sign * rate * j)
                lhs, rhs = hardy_smoothing(b, s, q, r, direction)
                out.add(ratio_case(f"{tag}-{direction}-{i}", lhs, rhs, c))
    return out
