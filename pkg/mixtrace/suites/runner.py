"""Run a registered suite, check refinement stability and persist its report."""
import csv
import json
import logging
import math
import time
from importlib import metadata
from pathlib import Path

from mixtrace import __version__
from mixtrace.errors import ConfigError
from mixtrace.models import Grid, RefinementResult, SpaceParams, SuiteConfig, SuiteReport
from mixtrace.observability import record_suite_run
from mixtrace.presets import get_suite_preset, load_profile
from mixtrace.suites.common import SuiteOutcome, summarize, tolerance
from mixtrace.suites.registry import SuiteEntry, get_suite

_LOG = logging.getLogger(__name__)

REFINE_TOLERANCE = 0.25
_ENV_PACKAGES = ("numpy", "scipy", "pydantic")


def resolve_config(cfg: SuiteConfig) -> SuiteConfig:
    """Fill unset fields from the suite's preset; explicit options and tolerances win key by key."""
    if load_profile(cfg.profile) is None:
        raise ConfigError(f"unknown preset profile {cfg.profile!r}")
    preset = get_suite_preset(cfg.profile, cfg.suite)
    update = {}
    if cfg.grid is None and preset.get("grid") is not None:
        update["grid"] = Grid.model_validate(preset["grid"])
    if cfg.params is None and preset.get("params") is not None:
        update["params"] = SpaceParams.model_validate(preset["params"])
    if cfg.ensemble_size is None and preset.get("ensemble_size") is not None:
        update["ensemble_size"] = int(preset["ensemble_size"])
    update["options"] = {**(preset.get("options") or {}), **cfg.options}
    update["tolerances"] = {**(preset.get("tolerances") or {}), **cfg.tolerances}
    return cfg.model_copy(update=update)


def _environment() -> dict[str, str]:
    env = {"mixtrace": __version__}
    for name in _ENV_PACKAGES:
        try:
            env[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            env[name] = "unknown"
    return env


def _execute(entry: SuiteEntry, cfg: SuiteConfig) -> SuiteOutcome:
    start = time.time()
    outcome = entry.func(cfg)
    seconds = time.time() - start
    _LOG.info(
        "suite finished",
        extra={
            "suite": entry.name,
            "grid": None if cfg.grid is None else list(cfg.grid.points),
            "cases": len(outcome.cases),
            "seconds": round(seconds, 3),
        },
    )
    return outcome


def _variation(coarse: float, fine: float) -> float:
    if coarse == 0.0:
        return 0.0 if fine == 0.0 else math.inf
    return abs(fine - coarse) / abs(coarse)


def _refinement(entry: SuiteEntry, cfg: SuiteConfig, coarse: SuiteOutcome) -> RefinementResult:
    if cfg.grid is None:
        raise ConfigError(f"suite {entry.name!r} has no grid to refine")
    fine_grid = cfg.grid.refined()
    fine = _execute(entry, cfg.model_copy(update={"grid": fine_grid}))
    c_coarse = summarize(coarse.primary_ratios())[0]
    c_fine = summarize(fine.primary_ratios())[0]
    variation = _variation(c_coarse, c_fine)
    return RefinementResult(
        coarse=cfg.grid,
        fine=fine_grid,
        constant_coarse=c_coarse,
        constant_fine=c_fine,
        variation=variation,
        stable=variation < tolerance(cfg, "refine", REFINE_TOLERANCE),
    )


def run_suite(cfg: SuiteConfig) -> SuiteReport:
    """Run the named suite on the merged configuration and assemble its report.

    Raises UnknownSuiteError for unregistered names and ConfigError for infeasible grids or parameters.
    """
    entry = get_suite(cfg.suite)
    merged = resolve_config(cfg)
    start = time.time()
    outcome = _execute(entry, merged)

    failures = list(outcome.failures)
    informational = set(outcome.informational_groups)
    failures.extend(c.case_id for c in outcome.cases if not c.passed and c.group not in informational)
    notes = list(outcome.notes)

    refinement = None
    if merged.refine_check:
        if entry.refinable:
            refinement = _refinement(entry, merged, outcome)
            if not refinement.stable:
                failures.append(f"refinement: constant moved by {refinement.variation:.3g}")
        else:
            notes.append("refinement check skipped: suite is grid independent or exact")

    constant_max, constant_p95 = summarize(outcome.primary_ratios())
    report = SuiteReport(
        suite=entry.name,
        statement=entry.statement,
        passed=not failures,
        informational=any(c.group in informational for c in outcome.cases),
        declared_constant=outcome.declared_constant,
        constant_max=constant_max,
        constant_p95=constant_p95,
        cases=tuple(outcome.cases),
        failures=tuple(failures),
        notes=tuple(notes),
        refinement=refinement,
        config=json.loads(merged.model_dump_json()),
        environment=_environment(),
    )
    record_suite_run(entry.name, report.passed, time.time() - start)
    if failures:
        _LOG.warning("suite failed", extra={"suite": entry.name, "failures": len(failures)})
    return report


# --- persistence --------------------------------------------------------------


def report_json(report: SuiteReport) -> str:
    """Canonical JSON: sorted keys, two-space indent, infinities as Infinity."""
    return json.dumps(json.loads(report.model_dump_json()), sort_keys=True, indent=2) + "\n"


def _write_cases_csv(report: SuiteReport, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["case_id", "group", "lhs", "rhs", "ratio", "passed", "note"])
        for c in report.cases:
            writer.writerow([c.case_id, c.group, repr(c.lhs), repr(c.rhs), repr(c.ratio), int(c.passed), c.note])


def _write_gnuplot(report: SuiteReport, path: Path) -> None:
    """One data block per case group (select with `index`), columns: case number, ratio, lhs, rhs."""
    groups: dict[str, list] = {}
    for c in report.cases:
        groups.setdefault(c.group, []).append(c)
    blocks = []
    for group, cases in groups.items():
        lines = [f"# {report.suite} group {group}", "# i ratio lhs rhs"]
        lines.extend(f"{i} {c.ratio!r} {c.lhs!r} {c.rhs!r}" for i, c in enumerate(cases))
        blocks.append("\n".join(lines))
    path.write_text("\n\n\n".join(blocks) + "\n", encoding="utf-8")


def emit_report(report: SuiteReport, out_dir: str | Path) -> dict[str, Path]:
    """Write <suite>.json, <suite>_cases.csv and <suite>.dat under out_dir; returns the paths by kind."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "json": out / f"{report.suite}.json",
            "csv": out / f"{report.suite}_cases.csv",
            "dat": out / f"{report.suite}.dat",
        }
        paths["json"].write_text(report_json(report), encoding="utf-8")
        _write_cases_csv(report, paths["csv"])
        _write_gnuplot(report, paths["dat"])
    except OSError as e:
        raise ConfigError(f"cannot write report to {out}: {e}") from e
    _LOG.info("report written", extra={"suite": report.suite, "dir": str(out)})
    return paths
