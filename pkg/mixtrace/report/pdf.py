"""Suite report PDF rendering with ReportLab (US Letter, Helvetica, one summary page plus case tables)."""
import io
import json
import math
import xml.sax.saxutils

from reportlab.lib import colors
from reportlab.lib.pagesizes import letter
from reportlab.lib.styles import ParagraphStyle
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from mixtrace import __version__
from mixtrace.models import SuiteReport
from mixtrace.report.constants import (
    COLOR_ACCENT_DARK,
    COLOR_DARK,
    COLOR_FAIL,
    COLOR_GRID,
    COLOR_MUTED,
    COLOR_PASS,
    MAX_CASE_ROWS,
)

MARGIN_LR = 0.75 * inch
MARGIN_TOP = 0.85 * inch
MARGIN_BOTTOM = 0.8 * inch
SECTION_SPACER = 0.25 * inch


def _escape_para(text: str) -> str:
    """Escape &, <, > for ReportLab Paragraph XML."""
    if not text:
        return ""
    return xml.sax.saxutils.escape(text, {"&": "&amp;", "<": "&lt;", ">": "&gt;"})


def _num(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.4g}"


def _styles():
    """Plain dict of paragraph styles to avoid ReportLab stylesheet name clashes."""
    return {
        "Title": ParagraphStyle(name="MT_Title", fontName="Helvetica-Bold", fontSize=24, textColor=colors.HexColor(COLOR_DARK), spaceAfter=12),
        "H1": ParagraphStyle(name="MT_H1", fontName="Helvetica-Bold", fontSize=16, textColor=colors.HexColor(COLOR_DARK), spaceBefore=18, spaceAfter=8),
        "H2": ParagraphStyle(name="MT_H2", fontName="Helvetica-Bold", fontSize=13, textColor=colors.HexColor(COLOR_ACCENT_DARK), spaceBefore=14, spaceAfter=6),
        "Body": ParagraphStyle(name="MT_Body", fontName="Helvetica", fontSize=10.5, textColor=colors.HexColor(COLOR_DARK), spaceAfter=6),
        "Small": ParagraphStyle(name="MT_Small", fontName="Helvetica", fontSize=9, textColor=colors.HexColor(COLOR_MUTED), spaceAfter=4),
        "Code": ParagraphStyle(name="MT_Code", fontName="Courier", fontSize=8, textColor=colors.HexColor(COLOR_DARK), leading=10),
    }


def _table_with_header(data, col_widths=None, status_column: int | None = None):
    """Table with a dark header row and grid; the status column is colored by PASS/FAIL."""
    t = Table(data, colWidths=col_widths, repeatRows=1)
    style = [
        ("BACKGROUND", (0, 0), (-1, 0), colors.HexColor(COLOR_ACCENT_DARK)),
        ("TEXTCOLOR", (0, 0), (-1, 0), colors.white),
        ("FONTNAME", (0, 0), (-1, 0), "Helvetica-Bold"),
        ("FONTSIZE", (0, 0), (-1, -1), 9),
        ("TEXTCOLOR", (0, 1), (-1, -1), colors.HexColor(COLOR_DARK)),
        ("FONTNAME", (0, 1), (-1, -1), "Helvetica"),
        ("GRID", (0, 0), (-1, -1), 0.5, colors.HexColor(COLOR_GRID)),
        ("LEFTPADDING", (0, 0), (-1, -1), 6),
        ("RIGHTPADDING", (0, 0), (-1, -1), 6),
        ("TOPPADDING", (0, 0), (-1, -1), 4),
        ("BOTTOMPADDING", (0, 0), (-1, -1), 4),
    ]
    if status_column is not None:
        for row, values in enumerate(data[1:], start=1):
            color = COLOR_PASS if values[status_column] == "pass" else COLOR_FAIL
            style.append(("TEXTCOLOR", (status_column, row), (status_column, row), colors.HexColor(color)))
    t.setStyle(TableStyle(style))
    return t


def _make_footer(suite: str):
    def _add_footer(canvas, doc):
        canvas.saveState()
        y_footer = MARGIN_BOTTOM - 0.25 * inch
        canvas.setFont("Helvetica", 8)
        canvas.setFillColor(colors.HexColor(COLOR_MUTED))
        canvas.drawString(MARGIN_LR, y_footer, f"mixtrace v{__version__} suite report: {suite}")
        canvas.drawRightString(letter[0] - MARGIN_LR, y_footer, f"Page {doc.page}")
        canvas.restoreState()
    return _add_footer


def _summary_rows(report: SuiteReport) -> list[list[str]]:
    listed = set(report.failures)
    informational = sum(1 for c in report.cases if not c.passed and c.case_id not in listed)
    rows = [
        ["Item", "Value"],
        ["Outcome", "pass" if report.passed else "fail"],
        ["Declared constant", _num(report.declared_constant)],
        ["Empirical constant (max)", _num(report.constant_max)],
        ["Empirical constant (p95)", _num(report.constant_p95)],
        ["Cases", str(len(report.cases))],
        ["Failed assertions", str(len(report.failures))],
    ]
    if report.informational:
        rows.append(["Informational cases over the bound", str(informational)])
    return rows


def _ordered_cases(report: SuiteReport):
    failing = [c for c in report.cases if not c.passed]
    passing = [c for c in report.cases if c.passed]
    return (failing + passing)[:MAX_CASE_ROWS]


def generate_suite_report_pdf(report: SuiteReport) -> bytes:
    """Render a SuiteReport to PDF bytes."""
    buffer = io.BytesIO()
    doc = SimpleDocTemplate(
        buffer,
        pagesize=letter,
        leftMargin=MARGIN_LR,
        rightMargin=MARGIN_LR,
        topMargin=MARGIN_TOP,
        bottomMargin=MARGIN_BOTTOM,
        title=f"mixtrace {report.suite}",
    )
    styles = _styles()
    story = [
        Paragraph(_escape_para(f"Suite {report.suite}"), styles["Title"]),
        Paragraph(_escape_para(report.statement), styles["Body"]),
        Spacer(1, SECTION_SPACER),
        Paragraph("Summary", styles["H1"]),
        _table_with_header(_summary_rows(report), [3.2 * inch, 3.0 * inch]),
    ]

    if report.failures:
        story.append(Paragraph("Failed assertions", styles["H2"]))
        for case_id in report.failures[:MAX_CASE_ROWS]:
            story.append(Paragraph(_escape_para(case_id), styles["Code"]))

    if report.refinement is not None:
        r = report.refinement
        story.append(Paragraph("Refinement", styles["H2"]))
        story.append(_table_with_header([
            ["Grid", "Constant"],
            ["x".join(str(n) for n in r.coarse.points), _num(r.constant_coarse)],
            ["x".join(str(n) for n in r.fine.points), _num(r.constant_fine)],
        ], [3.2 * inch, 3.0 * inch]))
        story.append(Paragraph(
            f"Relative change {_num(r.variation)}: {'stable' if r.stable else 'not stable'}.", styles["Small"],
        ))

    if report.notes:
        story.append(Paragraph("Notes", styles["H2"]))
        for note in report.notes:
            story.append(Paragraph(_escape_para(note), styles["Body"]))

    story.append(Paragraph("Cases", styles["H1"]))
    rows = [["Case", "Group", "Left", "Right", "Ratio", "Status"]]
    for c in _ordered_cases(report):
        rows.append([c.case_id, c.group, _num(c.lhs), _num(c.rhs), _num(c.ratio), "pass" if c.passed else "fail"])
    story.append(_table_with_header(rows, [2.3 * inch, 1.0 * inch, 0.8 * inch, 0.8 * inch, 0.7 * inch, 0.6 * inch], status_column=5))
    if len(report.cases) > MAX_CASE_ROWS:
        story.append(Paragraph(f"First {MAX_CASE_ROWS} of {len(report.cases)} cases, failures first.", styles["Small"]))

    story.append(Paragraph("Environment and configuration", styles["H2"]))
    env = ", ".join(f"{k} {v}" for k, v in sorted(report.environment.items()))
    story.append(Paragraph(_escape_para(env), styles["Small"]))
    config = json.dumps(report.config, sort_keys=True, indent=1)
    for line in config.splitlines():
        story.append(Paragraph(_escape_para(line).replace(" ", "&nbsp;"), styles["Code"]))

    footer = _make_footer(report.suite)
    doc.build(story, onFirstPage=footer, onLaterPages=footer)
    return buffer.getvalue()
