"""
Shared JSON document handling: parsing, pydantic validation and line-numbered diagnostics.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Optional, Sequence, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from backend.shared.utils.config import grid_setting
from backend.shared.utils.errors import CaseFileError

Model = TypeVar("Model", bound=BaseModel)

_DECODER = json.JSONDecoder()
_WHITESPACE = re.compile(r"\s*")


def data_dir() -> Path:
    configured = grid_setting("GRID_LAB_DATA_DIR")
    if configured:
        return Path(configured)
    return Path(__file__).resolve().parents[3] / "data"


def resolve_bundled(reference: Union[str, Path], kind: str, relative_to: Optional[Path] = None) -> Path:
    """Existing path, path relative to ``relative_to``, or a bundled ``data/<kind>/<name>.json``."""
    reference = Path(reference)
    candidates = [reference]
    if relative_to is not None and not reference.is_absolute():
        candidates.append(relative_to / reference)
    stem = reference.name
    for suffix in (".json", ".case", ".scenario"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    candidates.append(data_dir() / kind / f"{stem}.json")
    for candidate in candidates:
        if candidate.is_file():
            return candidate
    raise CaseFileError(f"no such {kind[:-1]} file or bundled name", source=str(reference))


def _skip(text: str, pos: int) -> int:
    return _WHITESPACE.match(text, pos).end()


def _member(text: str, pos: int, key: str) -> Optional[int]:
    pos = _skip(text, pos + 1)
    while pos < len(text) and text[pos] != "}":
        name, end = _DECODER.raw_decode(text, pos)
        pos = _skip(text, end)
        if text[pos] != ":":
            return None
        value_start = _skip(text, pos + 1)
        if name == key:
            return value_start
        _, end = _DECODER.raw_decode(text, value_start)
        pos = _skip(text, end)
        if pos < len(text) and text[pos] == ",":
            pos = _skip(text, pos + 1)
    return None


def _element(text: str, pos: int, index: int) -> Optional[int]:
    pos = _skip(text, pos + 1)
    count = 0
    while pos < len(text) and text[pos] != "]":
        if count == index:
            return pos
        _, end = _DECODER.raw_decode(text, pos)
        pos = _skip(text, end)
        if pos < len(text) and text[pos] == ",":
            pos = _skip(text, pos + 1)
        count += 1
    return None


def locate(text: str, loc: Sequence[Union[str, int]]) -> Optional[int]:
    """1-based line of the deepest entry along ``loc`` that exists in ``text``."""
    try:
        pos = _skip(text, 0)
        for key in loc:
            if pos >= len(text):
                break
            if text[pos] == "{" and isinstance(key, str):
                found = _member(text, pos, key)
            elif text[pos] == "[" and isinstance(key, int):
                found = _element(text, pos, key)
            else:
                break
            if found is None:
                break
            pos = found
    except (ValueError, IndexError):
        return None
    return text.count("\n", 0, pos) + 1


def dotted_path(loc: Sequence[Union[str, int]]) -> str:
    """('buses', 3, 'D') -> 'buses[3].D'."""
    path = ""
    for key in loc:
        if isinstance(key, int):
            path += f"[{key}]"
        else:
            path += f".{key}" if path else str(key)
    return path


def parse_document(
    text: str,
    model: Type[Model],
    source: str = "<string>",
    error_cls: Type[CaseFileError] = CaseFileError,
) -> tuple[Model, dict]:
    """Decode JSON text and validate it; the first validation error becomes ``error_cls``."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise error_cls(f"invalid JSON: {exc.msg} (column {exc.colno})", source=source, line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise error_cls("document must be a JSON object", source=source, line=1)
    try:
        return model.model_validate(raw), raw
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = tuple(first.get("loc", ()))
        message = str(first.get("msg", "invalid value")).removeprefix("Value error, ")
        raise error_cls(message, source=source, line=locate(text, loc), path=dotted_path(loc)) from None


def line_of(text: str, *loc: Union[str, int]) -> Optional[int]:
    return locate(text, loc)
