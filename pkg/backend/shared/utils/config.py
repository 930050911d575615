"""
Settings access for library code.

The backend runs both inside the Django project (management commands, tests)
and as a plain library. ``grid_setting`` reads ``django.conf.settings`` when it
is configured and falls back to the library default otherwise.
"""

from __future__ import annotations

from typing import Any

DEFAULTS: dict[str, Any] = {
    "GRID_LAB_DT": 1e-3,
    "GRID_LAB_NEWTON_TOL": 1e-10,
    "GRID_LAB_NEWTON_MAX_ITER": 50,
    "GRID_LAB_SETTLE_THRESHOLD": 1e-3,
    "GRID_LAB_INTEGRAL_GAIN": 60.0,
    "GRID_LAB_COMPARE_WORKERS": 1,
    "GRID_LAB_DATA_DIR": None,
    "GRID_LAB_OUTPUT_DIR": None,
}


def grid_setting(name: str, default: Any = None) -> Any:
    """Return a Grid Lab setting, preferring Django settings when available."""
    fallback = DEFAULTS.get(name, default) if default is None else default
    try:
        from django.conf import settings
    except ImportError:  # pragma: no cover - Django is a hard dependency of the project
        return fallback
    if not settings.configured:
        return fallback
    return getattr(settings, name, fallback)
