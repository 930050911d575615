"""
Common utilities for grid tasks.
Provides standardized response formatting and input validation.
"""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from backend.shared.utils.errors import DimensionError, ErrorCodes, GridLabError


def _meta() -> Dict[str, str]:
    return {"version": "1.0.0", "generated_at": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")}


def success_payload(service: str, subtask: str, params: dict, data: dict, insights: Optional[List[str]] = None) -> Dict[str, Any]:
    """Create a standardized success response payload."""
    return {
        "service": service,
        "subtask": subtask,
        "status": "success",
        "params": params,
        "data": data,
        "insights": insights or [],
        "meta": _meta(),
    }


def error_payload(
    service: str, subtask: str, message: str, code: int = 400, error_code: Optional[ErrorCodes] = None
) -> tuple[Dict[str, Any], int]:
    """Create a standardized error response payload."""
    if error_code is None:
        error_code = {404: ErrorCodes.NOT_FOUND, 500: ErrorCodes.INTERNAL_ERROR}.get(code, ErrorCodes.INVALID_INPUT)
    return ({
        "service": service,
        "subtask": subtask,
        "status": "error",
        "error": message,
        "error_code": error_code.value,
        "meta": _meta(),
    }, code)


def domain_error_payload(service: str, subtask: str, exc: ValueError) -> tuple[Dict[str, Any], int]:
    """Map a domain ``ValueError`` onto a 400 payload, keeping its error code."""
    error_code = exc.code if isinstance(exc, GridLabError) else ErrorCodes.INVALID_INPUT
    return error_payload(service, subtask, str(exc), 400, error_code)


def require(body: dict, fields: List[str]) -> None:
    """Validate that required fields are present in the request body."""
    missing = [f for f in fields if f not in body]
    if missing:
        raise ValueError(f"Missing required fields: {', '.join(missing)}")


def validate_positive_numbers(data: dict, fields: List[str]) -> None:
    """Validate that specified fields contain positive numbers."""
    for field in fields:
        if field in data and data[field] is not None:
            value = safe_float(data[field], field)
            if value <= 0:
                raise ValueError(f"{field} must be > 0")


def safe_float(value: Any, field_name: str) -> float:
    """Safely convert a value to float with proper error handling."""
    try:
        return float(value)
    except (ValueError, TypeError):
        raise ValueError(f"{field_name} must be a valid number")


def as_vector(values: Sequence[float] | np.ndarray, size: int, name: str) -> np.ndarray:
    """Return ``values`` as a float vector of length ``size`` or raise ``DimensionError``."""
    array = np.asarray(values, dtype=float)
    if array.ndim != 1 or array.shape[0] != size:
        raise DimensionError(f"{name} must have {size} entries, got shape {array.shape}")
    return array


def to_builtin(value: Any) -> Any:
    """Convert numpy scalars/arrays nested in dicts and lists into JSON-friendly builtins."""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_builtin(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    return value
