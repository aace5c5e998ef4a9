"""Load preset profiles and golden tables from JSON next to this module."""
import json
from pathlib import Path
from typing import Any

_PRESET_DIR = Path(__file__).resolve().parent
_CACHE: dict[str, Any] = {}
_TABLE_PREFIX = "borderline_"


def _load(name: str) -> Any | None:
    if name in _CACHE:
        return _CACHE[name]
    path = _PRESET_DIR / f"{name}.json"
    if not path.is_file():
        return None
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (json.JSONDecodeError, OSError):
        return None
    _CACHE[name] = data
    return data


def get_profiles() -> list[dict[str, Any]]:
    """Return list of { id, description } for every profile file."""
    out = []
    for path in sorted(_PRESET_DIR.glob("*.json")):
        if path.stem.startswith(_TABLE_PREFIX):
            continue
        data = _load(path.stem)
        if isinstance(data, dict):
            out.append({"id": path.stem, "description": data.get("description", "")})
    return out


def load_profile(profile: str) -> dict[str, Any] | None:
    if profile.startswith(_TABLE_PREFIX):
        return None
    data = _load(profile)
    return data if isinstance(data, dict) else None


def get_suite_preset(profile: str, suite: str) -> dict[str, Any]:
    """Preset fields of one suite under a profile; empty when either is unknown."""
    data = load_profile(profile)
    if not data:
        return {}
    return dict((data.get("suites") or {}).get(suite) or {})


def load_golden_table(name: str = "borderline_golden") -> list[dict[str, Any]]:
    data = _load(name)
    if not isinstance(data, dict):
        return []
    return list(data.get("rows") or [])
