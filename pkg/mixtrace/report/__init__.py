"""PDF rendering of suite reports."""
from mixtrace.report.pdf import generate_suite_report_pdf

__all__ = ["generate_suite_report_pdf"]
