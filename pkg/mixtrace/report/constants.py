"""Colors and limits for rendered suite reports."""

COLOR_DARK = "#1e293b"       # body text, headings
COLOR_MUTED = "#64748b"      # small text, footer
COLOR_ACCENT_DARK = "#1e3a8a"  # table header, section headings
COLOR_GRID = "#e2e8f0"       # table grid
COLOR_PASS = "#10b981"
COLOR_FAIL = "#ef4444"

# cases listed in the PDF; the CSV written by emit_report carries all of them
MAX_CASE_ROWS = 80
