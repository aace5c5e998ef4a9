"""Preset profiles (quick, desk) and golden tables for the verification suites. See presets/README.md for format."""
from mixtrace.presets.loader import (
    get_profiles,
    get_suite_preset,
    load_golden_table,
    load_profile,
)

__all__ = ["get_profiles", "get_suite_preset", "load_golden_table", "load_profile"]
