#!/usr/bin/env python3
"""Run one suite on the quick profile and write its JSON, CSV, gnuplot data and PDF to reports/sample/.
Run from repo root: python scripts/generate_sample_report.py [suite]
"""
import sys
from pathlib import Path

# Allow running without PYTHONPATH
_root = Path(__file__).resolve().parent.parent
if str(_root) not in sys.path:
    sys.path.insert(0, str(_root))


from mixtrace.models import SuiteConfig
from mixtrace.report import generate_suite_report_pdf
from mixtrace.suites import emit_report, run_suite


def main():
    suite = sys.argv[1] if len(sys.argv) > 1 else "lift"
    out_dir = _root / "reports" / "sample"
    report = run_suite(SuiteConfig(suite=suite, profile="quick", seed=0))
    paths = emit_report(report, out_dir)
    pdf_path = out_dir / f"{suite}.pdf"
    pdf_path.write_bytes(generate_suite_report_pdf(report))
    for path in [*paths.values(), pdf_path]:
        print(f"Wrote {path}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
