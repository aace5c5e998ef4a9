"""Dyadic ball and corona criteria: sums of spectrally localized pieces against their F or B quantity."""
import logging
from typing import Literal

from mixtrace.borderlines import ball_threshold, exact, exact_or_inf
from mixtrace.errors import ConfigError
from mixtrace.grid_field import combine
from mixtrace.littlewood_paley import CUTOFF, PLATEAU, decompose
from mixtrace.models import GridField, SpaceParams, SuiteConfig
from mixtrace.norms import lq, mixed_lp_lq_norm, mixed_lp_norm, space_quasi_norm
from mixtrace.suites.common import (
    SuiteOutcome,
    as_float,
    check_band,
    covering_family,
    ensemble_size,
    exponents,
    option,
    ratio_case,
    require_grid,
    require_params,
    tolerance,
)
from mixtrace.suites.ensembles import band_limited, localized, mixed_ensemble, rng_for
from mixtrace.suites.registry import register

_LOG = logging.getLogger(__name__)

# a second partition whose coronas differ from the one measuring the sum
ALT_PLATEAU = 1.0
ALT_CUTOFF = 1.6


def sequence_quantity(pieces: list[GridField], sp: SpaceParams, weights: list[float]) -> float:
    """F: ||(sum_j |w_j u_j|^q)^{1/q}||_{L_p}; B: l_q of w_j ||u_j||_{L_p}."""
    if sp.scale == "F":
        return mixed_lp_lq_norm(pieces, sp.p, sp.q, weights=weights)
    return lq([w * mixed_lp_norm(u, sp.p) for w, u in zip(weights, pieces)], sp.q)


def _threshold(sp: SpaceParams) -> float:
    return float(ball_threshold(
        [exact(w) for w in sp.a.a], [exact(x) for x in sp.p.p], exact_or_inf(sp.q), sp.scale,
    ))


def _signs(cfg: SuiteConfig, key, count: int) -> list[float]:
    return list(rng_for(cfg.seed, "signs", key).choice([-1.0, 1.0], size=count))


def _ball_suite(cfg: SuiteConfig, scale: Literal["F", "B"]) -> SuiteOutcome:
    grid = require_grid(cfg)
    sp = require_params(cfg).model_copy(update={"scale": scale})
    if scale == "F" and not sp.p.finite:
        raise ConfigError("the F-scale ball criterion needs finite p")
    levels = int(option(cfg, "levels", 4))
    top = 2.0 ** levels
    check_band(grid, sp.a, top)
    bound = tolerance(cfg, "constant", 8.0)
    threshold = _threshold(sp)
    fam = covering_family(sp.a, grid, top)
    out = SuiteOutcome(declared_constant=bound, informational_groups=("below-threshold",))
    out.notes.append(f"ball threshold {threshold:.6g}")

    js = list(range(levels + 1))
    for offset in option(cfg, "offsets", [0.5, 1, 2]):
        s = threshold + as_float(offset)
        target = sp.model_copy(update={"s": s})
        weights = [2.0 ** (s * j) for j in js]
        for i in range(ensemble_size(cfg)):
            rng = rng_for(cfg.seed, "ball", offset, i)
            signs = rng.choice([-1.0, 1.0], size=len(js))
            pieces = [combine([band_limited(grid, sp.a, 2.0 ** j, rng)], [e / w]) for j, e, w in zip(js, signs, weights)]
            total = combine(pieces)
            out.add(ratio_case(
                f"s{s:.4g}-{i}", space_quasi_norm(total, target, fam).value, sequence_quantity(pieces, target, weights), bound,
            ))

    # a fixed profile repeated with growing weights: the quantity grows slower than the sum below the threshold
    s_low = threshold - float(option(cfg, "below", 0.5))
    low = sp.model_copy(update={"s": s_low})
    profile = localized(grid, sp.a, 1.0, (0.0,) * grid.n)
    ratios = []
    for last in js:
        weights = [2.0 ** (s_low * j) for j in range(last + 1)]
        pieces = [combine([profile], [1.0 / w]) for w in weights]
        case = out.add(ratio_case(
            f"partial-{last}", space_quasi_norm(combine(pieces), low, fam).value, sequence_quantity(pieces, low, weights),
            bound, group="below-threshold",
        ))
        ratios.append(case.ratio)
    if ratios[0] > 0:
        out.notes.append(f"below threshold s = {s_low:.4g}: ratio grows by {ratios[-1] / ratios[0]:.4g} over {levels} levels")
    return out


def _corona_suite(cfg: SuiteConfig, scale: Literal["F", "B"]) -> SuiteOutcome:
    grid = require_grid(cfg)
    base = require_params(cfg).model_copy(update={"scale": scale})
    radius = float(option(cfg, "radius", 16))
    check_band(grid, base.a, radius)
    bound = tolerance(cfg, "constant", 8.0)
    fam = covering_family(base.a, grid, radius)
    alt = covering_family(base.a, grid, radius, plateau=ALT_PLATEAU, cutoff=ALT_CUTOFF)
    out = SuiteOutcome(declared_constant=bound)
    fields = mixed_ensemble(grid, base.a, radius, ensemble_size(cfg), cfg.seed, "corona")

    for values in option(cfg, "p_values", [[2] * grid.n, [1] + [2] * (grid.n - 1)]):
        p = exponents(values)
        if scale == "F" and not p.finite:
            raise ConfigError("the F-scale corona criterion needs finite p")
        p_tag = "p" + "-".join(f"{x:g}" for x in p.p)
        for case_id, u in fields:
            pieces = list(decompose(u, alt).blocks)
            signs = _signs(cfg, case_id, len(pieces))
            pieces = [combine([piece], [e]) for piece, e in zip(pieces, signs)]
            total = combine(pieces)
            d = decompose(total, fam)
            for s in option(cfg, "smoothness", [-1, 0, 1, 2]):
                sp = base.model_copy(update={"s": float(s), "p": p})
                weights = [2.0 ** (sp.s * j) for j in alt.indices]
                out.add(ratio_case(
                    f"{p_tag}-s{s:g}-{case_id}", space_quasi_norm(total, sp, fam, d).value,
                    sequence_quantity(pieces, sp, weights), bound,
                ))
    return out


@register("ball-F", "||sum u_j||_{F^s_{p,q}} <= c ||2^{sj} u_j||_{L_p(l_q)} for supp F u_j in |xi|_a <= 2^j, s above the ball threshold")
def ball_f(cfg: SuiteConfig) -> SuiteOutcome:
    return _ball_suite(cfg, "F")


@register("ball-B", "||sum u_j||_{B^s_{p,q}} <= c ||2^{sj} ||u_j||_{L_p}||_{l_q} for supp F u_j in |xi|_a <= 2^j, s above the ball threshold")
def ball_b(cfg: SuiteConfig) -> SuiteOutcome:
    return _ball_suite(cfg, "B")


@register("corona-F", "||sum u_j||_{F^s_{p,q}} <= c ||2^{sj} u_j||_{L_p(l_q)} for u_j in dyadic coronas, every real s")
def corona_f(cfg: SuiteConfig) -> SuiteOutcome:
    return _corona_suite(cfg, "F")


@register("corona-B", "||sum u_j||_{B^s_{p,q}} <= c ||2^{sj} ||u_j||_{L_p}||_{l_q} for u_j in dyadic coronas, every real s")
def corona_b(cfg: SuiteConfig) -> SuiteOutcome:
    return _corona_suite(cfg, "B")


def _corona_shape(cfg: SuiteConfig, lam: float) -> tuple[float, float]:
    """Plateau and cutoff of the piece family; options.A fixes the corona constant."""
    if option(cfg, "A", None) is None:
        return PLATEAU, CUTOFF
    c = as_float(option(cfg, "A", None)) ** (1.0 / lam)
    if c * c <= 2.0:
        raise ConfigError(f"corona constant A must exceed 2^(lambda/2) = {2.0 ** (lam / 2):.4g} for lambda {lam:g}")
    return 2.0 / c, c


@register(
    "corona-lambda",
    "||sum u_j||_{F^s_{p,q}} <= c ||2^{lambda s j} u_j||_{L_p(l_q)} for supp F u_j in 2^{lambda j}/A <= |xi|_a <= A 2^{lambda j}",
)
def corona_lambda(cfg: SuiteConfig) -> SuiteOutcome:
    grid = require_grid(cfg)
    base = require_params(cfg).model_copy(update={"scale": "F"})
    if not base.p.finite:
        raise ConfigError("the F-scale corona criterion needs finite p")
    radius = float(option(cfg, "radius", 16))
    check_band(grid, base.a, radius)
    bound = tolerance(cfg, "constant", 16.0)
    fam = covering_family(base.a, grid, radius)
    out = SuiteOutcome(declared_constant=bound)
    fields = mixed_ensemble(grid, base.a, radius, ensemble_size(cfg), cfg.seed, "lambda")

    for lam in option(cfg, "lambdas", [0.5, 2]):
        lam = as_float(lam)
        plateau, cutoff = _corona_shape(cfg, lam)
        out.notes.append(f"lambda {lam:g}: pieces in 2^(lambda j)/A <= |xi|_a <= A 2^(lambda j), A = {max(cutoff, 2.0 / plateau) ** lam:.4g}")
        # coronas of the lambda a family are the 2^{lambda j} coronas of a
        stretched = covering_family(base.a.scaled(lam), grid, radius ** (1.0 / lam), plateau=plateau, cutoff=cutoff)
        for case_id, u in fields:
            pieces = list(decompose(u, stretched).blocks)
            signs = _signs(cfg, (lam, case_id), len(pieces))
            pieces = [combine([piece], [e]) for piece, e in zip(pieces, signs)]
            total = combine(pieces)
            d = decompose(total, fam)
            for s in option(cfg, "smoothness", [0, 1]):
                sp = base.model_copy(update={"s": float(s)})
                weights = [2.0 ** (lam * sp.s * j) for j in stretched.indices]
                out.add(ratio_case(
                    f"lambda{lam:g}-s{s:g}-{case_id}", space_quasi_norm(total, sp, fam, d).value,
                    mixed_lp_lq_norm(pieces, sp.p, sp.q, weights=weights), bound,
                ))
    return out
