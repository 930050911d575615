"""
Controller Comparison
Runs one scenario under several controllers and tabulates the outcomes.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from backend.frequency_control.harness.runner import ScenarioResult, run_scenario
from backend.frequency_control.harness.scenarios import Scenario, with_controller
from backend.frequency_control.harness.schemas import ControllerEntry
from backend.shared.utils.config import grid_setting
from backend.shared.utils.errors import GridLabError, ScenarioError

logger = logging.getLogger(__name__)

TABLE_COLUMNS = [
    "label",
    "variant",
    "nadir",
    "settling_time",
    "steady_state_error",
    "final_spread",
    "max_spread",
    "control_effort",
    "dispatch_cost_gap",
    "max_abs_u_gap",
    "error",
]

PRESETS = (
    "gather_broadcast",
    "gather_broadcast_tanh",
    "gather_broadcast_tanh3",
    "decentralized_integral",
    "agc",
    "dai",
)


@dataclass(frozen=True)
class Comparison:
    table: pd.DataFrame
    results: tuple[Optional[ScenarioResult], ...]


def preset_controller(name: str, base: Scenario) -> ControllerEntry:
    """Controller section for a named preset, sharing the base scenario's gain and signal unit."""
    entry = base.document.controller if base.document is not None else None
    shared = {"k": entry.k if entry else None, "frequency_signal": entry.frequency_signal if entry else "rad/s"}
    net = base.network
    if name == "gather_broadcast":
        return ControllerEntry(variant="gather_broadcast", **shared)
    if name in ("gather_broadcast_tanh", "gather_broadcast_tanh3"):
        k2 = 3 if name.endswith("3") else 1
        return ControllerEntry(variant="gather_broadcast", cost_override={"family": "tanh", "k1": 1.0, "k2": k2}, **shared)
    if name == "decentralized_integral":
        return ControllerEntry(variant="decentralized_integral", controlled="generators", **shared)
    if name == "agc":
        heaviest = int(net.generator_idx[np.argmax(net.M[net.generator_idx])]) if len(net.generator_idx) else int(net.dynamic_idx[0])
        return ControllerEntry(variant="agc", measurement_bus=net.bus_ids[heaviest], **shared)
    if name == "dai":
        if entry is not None and entry.variant == "dai":
            return entry.model_copy(update={"cheaters": []})
        return ControllerEntry(
            variant="dai", communication={"topology": "circulant", "offsets": [1, 2, 5], "weight": 50.0}, **shared
        )
    raise ScenarioError(f"unknown controller preset {name!r} (expected one of {', '.join(PRESETS)} or a JSON file)")


def parse_controllers(items: Sequence[str], base: Scenario) -> list[tuple[str, ControllerEntry]]:
    """Presets by name, or JSON files holding one controller section or a list of them."""
    variants: list[tuple[str, ControllerEntry]] = []
    for item in items:
        if item in PRESETS:
            variants.append((item, preset_controller(item, base)))
            continue
        path = Path(item)
        if not path.is_file():
            raise ScenarioError(f"unknown controller preset {item!r} (expected one of {', '.join(PRESETS)} or a JSON file)")
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
            sections = raw if isinstance(raw, list) else [raw]
            for index, section in enumerate(sections):
                label = section.pop("label", f"{path.stem}[{index}]") if isinstance(section, dict) else f"{path.stem}[{index}]"
                variants.append((label, ControllerEntry.model_validate(section)))
        except (json.JSONDecodeError, ValidationError) as exc:
            raise ScenarioError(f"invalid controller file: {exc}", source=str(path)) from None
    return variants


def _row(label: str, result: Optional[ScenarioResult], error: Optional[str], variant: str) -> dict:
    row = {column: None for column in TABLE_COLUMNS}
    row.update({"label": label, "variant": variant, "error": error})
    if result is not None:
        for column in TABLE_COLUMNS[2:-1]:
            row[column] = result.summary.get(column)
    return row


def compare_controllers(
    base: Scenario,
    variants: Sequence[Union[ControllerEntry, tuple[str, ControllerEntry]]],
    workers: Optional[int] = None,
    write_outputs: bool = False,
) -> Comparison:
    """One run per controller on identical disturbances and seed; rows keep the input order.

    A variant that fails is reported in its row's ``error`` column and the
    remaining variants still run.
    """
    workers = int(workers or grid_setting("GRID_LAB_COMPARE_WORKERS") or 1)
    labelled = [item if isinstance(item, tuple) else (item.variant, item) for item in variants]

    def run_one(item: tuple[str, ControllerEntry]) -> tuple[Optional[ScenarioResult], Optional[str], str]:
        label, entry = item
        try:
            scenario = with_controller(base, entry).replace(
                id=f"{base.id}-{label}",
                csv_path=base.csv_path.with_name(f"{base.id}-{label}.csv") if write_outputs and base.csv_path else None,
                summary_path=base.summary_path.with_name(f"{base.id}-{label}.summary.txt")
                if write_outputs and base.summary_path
                else None,
            )
            return run_scenario(scenario, write_outputs=write_outputs), None, entry.variant
        except GridLabError as exc:
            logger.warning("Variant %s failed: %s", label, exc)
            return None, str(exc), entry.variant

    if workers > 1 and len(labelled) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(run_one, labelled))
    else:
        outcomes = [run_one(item) for item in labelled]

    rows = [_row(label, result, error, variant) for (label, _), (result, error, variant) in zip(labelled, outcomes)]
    table = pd.DataFrame(rows, columns=TABLE_COLUMNS)
    logger.info("Compared %d controllers on scenario %s (%d failed)", len(rows), base.id, sum(r["error"] is not None for r in rows))
    return Comparison(table, tuple(result for result, _, _ in outcomes))
