"""
Result files: trajectory CSV and key-value run summaries.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Any, Mapping, Union

from backend.frequency_control.analysis.trajectory import TrajectoryRecord

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def write_trajectory_csv(traj: TrajectoryRecord, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    traj.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep="", lineterminator="\n")
    logger.info("Wrote trajectory (%d samples) to %s", len(traj), path)
    return path


def format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def format_summary(summary: Mapping[str, Any]) -> str:
    """``key = value`` lines in sorted key order."""
    return "".join(f"{key} = {format_value(summary[key])}\n" for key in sorted(summary))


def parse_summary(text: str) -> dict[str, str]:
    values = {}
    for line in text.splitlines():
        if " = " in line:
            key, value = line.split(" = ", 1)
            values[key.strip()] = value.strip()
    return values


def write_summary(summary: Mapping[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_summary(summary), encoding="utf-8")
    logger.info("Wrote summary to %s", path)
    return path
