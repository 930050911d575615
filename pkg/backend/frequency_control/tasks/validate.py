"""
Validate Task
Checks a case or scenario document without running it.
"""

import json
from pathlib import Path

from backend.frequency_control.harness.cases import parse_case
from backend.frequency_control.harness.documents import resolve_bundled
from backend.frequency_control.harness.scenarios import parse_scenario
from backend.shared.utils.common import domain_error_payload, error_payload, require, success_payload
from backend.shared.utils.errors import CaseFileError


def _locate(reference: str) -> Path:
    """Path as given, else a bundled case, else a bundled scenario (``ieee39.case``, ``single_bias``)."""
    try:
        return resolve_bundled(reference, "cases")
    except CaseFileError:
        pass
    try:
        return resolve_bundled(reference, "scenarios")
    except CaseFileError:
        raise FileNotFoundError(reference) from None


def _document_kind(text: str, source: str) -> str:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CaseFileError(f"invalid JSON: {exc.msg} (column {exc.colno})", source=source, line=exc.lineno) from None
    kind = raw.get("document") if isinstance(raw, dict) else None
    if kind not in ("case", "scenario"):
        raise CaseFileError('"document" must be "case" or "scenario"', source=source, line=1, path="document")
    return kind


def run(params: dict, file_bytes: bytes | None = None) -> tuple[dict, int]:
    """
    Validate a document given by path or as uploaded bytes.

    Args:
        params: Dictionary containing path
        file_bytes: Optional document contents, used instead of reading path

    Returns:
        Tuple of (response_dict, status_code)
    """
    service, subtask = "grid", "validate"

    try:
        require(params, ["path"])
        path = Path(params["path"]) if file_bytes is not None else _locate(str(params["path"]))
        source = str(path)
        text = file_bytes.decode("utf-8") if file_bytes is not None else path.read_text(encoding="utf-8")
        kind = _document_kind(text, source)

        if kind == "case":
            bundle = parse_case(text, source)
            net = bundle.network
            data = {
                "document": kind,
                "name": bundle.name,
                "buses": net.n_buses,
                "branches": len(net.branches),
                "generators": len(net.generator_idx),
                "passive": len(net.passive_idx),
                "controlled": len(bundle.cost.controlled_idx),
                "cost_family": bundle.cost.family.value,
            }
        else:
            scenario = parse_scenario(text, source, base_dir=path.parent)
            data = {
                "document": kind,
                "id": scenario.id,
                "case": scenario.network.name,
                "variant": scenario.variant,
                "disturbances": len(scenario.disturbances),
                "horizon": scenario.horizon,
                "dt": scenario.integrator.dt,
            }
        return success_payload(service, subtask, params, data, [f"{source} is a valid {kind} document"]), 200

    except FileNotFoundError:
        return error_payload(service, subtask, f"{params.get('path')}: file not found")
    except ValueError as e:
        return domain_error_payload(service, subtask, e)
    except Exception as e:
        return error_payload(service, subtask, f"Internal error: {str(e)}", 500)
