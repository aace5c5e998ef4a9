"""Counterexample asymptotics at the trace borderline and the golden table of trace verdicts."""
import logging
import math
from fractions import Fraction
from typing import Any

from mixtrace.counterexamples import (
    borderline_smoothness,
    build_counterexample_family,
    counterexample_norm,
    dilation_absorption,
    fit_asymptotics,
    norm_table,
    plateau_defect,
    trace_slice_norm,
)
from mixtrace.errors import ConfigError
from mixtrace.models import AdmissibilityVerdict, AnisotropyVector, ExponentVector, SpaceParams, SuiteConfig, TraceSpec
from mixtrace.presets import load_golden_table
from mixtrace.suites.common import SuiteOutcome, as_float, error_case, flag_case, option, tolerance
from mixtrace.suites.registry import register
from mixtrace.trace_ext import admissible

_LOG = logging.getLogger(__name__)


def _family(cfg: SuiteConfig, a: list, p: list, axis: int, layout: str = "reduced"):
    return build_counterexample_family(
        axis,
        AnisotropyVector(a=tuple(as_float(x) for x in a), convention="raw"),
        ExponentVector(p=tuple(as_float(x) for x in p)),
        j_min=int(option(cfg, "j_min", 4)),
        j_max=int(option(cfg, "j_max", 12)),
        layout=layout,
    )


@register(
    "counterexample-slopes",
    "at s = a_m/p_m + sum_{k != m}(a_k/p_k - a_k)_+ the norms of v_j decay like j^{1/q - 1} while gamma_{0,m} v_j stays of size one",
    refinable=False,
)
def counterexample_slopes(cfg: SuiteConfig) -> SuiteOutcome:
    slope_tol = tolerance(cfg, "slope", 0.05)
    axis = int(option(cfg, "axis", 1))
    p = option(cfg, "p", [2, 2])
    delta = as_float(option(cfg, "below", 0.25))
    out = SuiteOutcome(declared_constant=slope_tol)

    for a in option(cfg, "anisotropies", [[1, 1], [1, 2]]):
        fam = _family(cfg, a, p, axis)
        t = borderline_smoothness(fam)
        a_tag = "a" + "-".join(str(x) for x in a)
        js = list(range(fam.j_min, fam.j_max + 1))
        for q in option(cfg, "q_values", [1, 2, 8]):
            q = as_float(q)
            rows = norm_table(fam, t, q, "B", js)
            fit = fit_asymptotics(js, [v for _, v in rows])
            expected = 1.0 / q - 1.0
            out.add(error_case(
                f"{a_tag}-q{q:g}", abs(fit.slope - expected), slope_tol,
                group="main", note=f"slope {fit.slope:.4f}, expected {expected:.4f}",
            ))
            if q > 1.0:
                ratios = [trace_slice_norm(fam, j) / value for j, value in rows]
                growing = all(later > earlier for earlier, later in zip(ratios, ratios[1:]))
                out.add(flag_case(f"{a_tag}-q{q:g}", growing, group="growth", note=f"trace/norm {ratios[0]:.4g} -> {ratios[-1]:.4g}"))
            # below the borderline the trace bound fails for q = 1 as well
            below = norm_table(fam, t - delta, q, "B", js)
            ratios = [trace_slice_norm(fam, j) / value for j, value in below]
            growing = all(later > earlier for earlier, later in zip(ratios, ratios[1:]))
            out.add(flag_case(
                f"{a_tag}-q{q:g}-below", growing, group="below",
                note=f"s = t - {delta:g}: trace/norm {ratios[0]:.4g} -> {ratios[-1]:.4g}",
            ))
        drift = max(abs(x - 1.0) for x in dilation_absorption(fam, fam.j_max))
        out.add(error_case(f"{a_tag}-absorption", drift, tolerance(cfg, "absorption", 1e-6), group="absorption"))
        defect = plateau_defect(fam, fam.j_min)
        out.add(error_case(f"{a_tag}-plateau", defect, tolerance(cfg, "plateau", 1e-9), group="plateau"))

    # F scale with q = p_m, where the slope is 1/p_m - 1
    for pm in option(cfg, "f_exponents", [2, 3]):
        pm = as_float(pm)
        exps = list(p)
        exps[axis - 1] = pm
        fam = _family(cfg, [1] * len(exps), exps, axis)
        t = borderline_smoothness(fam)
        js = list(range(fam.j_min, fam.j_max + 1))
        fit = fit_asymptotics(js, [v for _, v in norm_table(fam, t, pm, "F", js)])
        expected = 1.0 / pm - 1.0
        out.add(error_case(
            f"F-p{pm:g}", abs(fit.slope - expected), slope_tol, group="case2",
            note=f"slope {fit.slope:.4f}, expected {expected:.4f}",
        ))

    # the tensor shortcut against the materialized v_j
    factor_tol = tolerance(cfg, "factorization", 0.02)
    full = _family(cfg, [1, 1], p, axis, layout="full")
    reduced = _family(cfg, [1, 1], p, axis)
    t = borderline_smoothness(full)
    for j in option(cfg, "factorization_js", [2, 3]):
        dense = counterexample_norm(full, j, t, 2.0, "B")
        tensor = counterexample_norm(reduced, j, t, 2.0, "B")
        out.add(error_case(f"factorization-j{j}", abs(dense / tensor - 1.0), factor_tol, group="factorization"))
    return out


# --- golden table -------------------------------------------------------------


def _fractions(values: list[str]) -> list[Fraction]:
    return [Fraction(v) for v in values]


def _space(row: dict[str, Any], lam: Fraction = Fraction(1)) -> SpaceParams:
    a = [lam * x for x in _fractions(row["a"])]
    s = lam * Fraction(row["s"])
    q = math.inf if row["q"] == "inf" else float(Fraction(row["q"]))
    return SpaceParams(
        s=float(s),
        a=AnisotropyVector(a=tuple(float(x) for x in a), convention="raw"),
        p=ExponentVector(p=tuple(float(x) for x in _fractions(row["p"]))),
        q=q,
        scale="F",
    )


def _spec(row: dict[str, Any]) -> TraceSpec:
    return TraceSpec(axis=row["axis"], order=row.get("order", 0), m=row.get("m"))


_VERDICT_KEYS = {
    "admissible": "admissible",
    "borderline": "borderline",
    "open_case": "open_case",
    "strong": "strong_condition",
    "gap": "gap",
    "cauchy": "cauchy_strong_condition",
    "bound": "bound",
}


def compare_verdict(verdict: AdmissibilityVerdict, expect: dict[str, Any]) -> list[str]:
    """Names of the expected fields the verdict disagrees with."""
    wrong = []
    for key, field in _VERDICT_KEYS.items():
        if key in expect and getattr(verdict, field) != expect[key]:
            wrong.append(key)
    for key, value in expect.get("trace", {}).items():
        got = getattr(verdict.trace_space, key)
        if (list(got) if isinstance(got, tuple) else got) != value:
            wrong.append(f"trace.{key}")
    return wrong


_STABLE = ("admissible", "borderline", "open_case", "strong_condition", "gap")


@register("borderline-table", "trace admissibility, equality cases, strong conditions and trace spaces on golden parameter sets", refinable=False)
def borderline_table(cfg: SuiteConfig) -> SuiteOutcome:
    rows = load_golden_table(option(cfg, "table", "borderline_golden"))
    if not rows:
        raise ConfigError("golden table is missing or empty")
    out = SuiteOutcome(declared_constant=1.0)
    step = Fraction(1, 4)

    for row in rows:
        rid = row["id"]
        spec = _spec(row)
        verdict = admissible(_space(row), spec)
        wrong = compare_verdict(verdict, row.get("expect", {}))
        out.add(flag_case(rid, not wrong, group="main", note=", ".join(wrong)))

        for lam in (Fraction(1, 2), Fraction(2), Fraction(3)):
            scaled = admissible(_space(row, lam), spec)
            same = all(getattr(scaled, f) == getattr(verdict, f) for f in _STABLE)
            same = same and Fraction(scaled.bound) == lam * Fraction(verdict.bound)
            out.add(flag_case(f"{rid}-lambda{lam}", same, group="rescaling"))

        k = spec.axis - 1
        a_k = Fraction(row["a"][k])
        p_k = Fraction(row["p"][k])
        recovered = Fraction(verdict.trace_space.s) + spec.order * a_k + a_k / p_k
        out.add(flag_case(f"{rid}-arithmetic", recovered == Fraction(row["s"]), group="trace-arithmetic"))

        if verdict.admissible:
            raised = dict(row, s=str(Fraction(row["s"]) + step))
            out.add(flag_case(f"{rid}-monotone", admissible(_space(raised), spec).admissible, group="monotone"))
    return out
