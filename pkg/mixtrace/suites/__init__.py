"""Named verification suites: registry, seeded ensembles, suite bodies and the runner."""
from mixtrace.suites.registry import COVERAGE, OUT_OF_SCOPE, get_suite, suite_names
from mixtrace.suites.runner import emit_report, report_json, resolve_config, run_suite

__all__ = [
    "COVERAGE",
    "OUT_OF_SCOPE",
    "emit_report",
    "get_suite",
    "report_json",
    "resolve_config",
    "run_suite",
    "suite_names",
]
