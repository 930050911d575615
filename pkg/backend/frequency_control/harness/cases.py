"""
Case Files
Loading, building and serializing network/cost case documents.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from backend.frequency_control.costs.model import CostFamily, CostModel
from backend.frequency_control.costs.responses import LinearResponse, TanhResponse
from backend.frequency_control.harness.documents import line_of, parse_document, resolve_bundled
from backend.frequency_control.harness.schemas import SCHEMA_VERSION, CaseDocument
from backend.frequency_control.network.model import Branch, NetworkModel
from backend.shared.utils.errors import CaseFileError, GridLabError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CaseBundle:
    network: NetworkModel
    cost: CostModel
    source: str = "<string>"
    source_notes: str = ""
    weights_seed: Optional[int] = None

    @property
    def name(self) -> str:
        return self.network.name


def _draw_weights(doc: CaseDocument) -> dict[int, float]:
    """Weights given as null, drawn in bus order from the seeded generator."""
    rng = np.random.default_rng(doc.weights_seed)
    low, high = doc.weights_range
    drawn: dict[int, float] = {}
    for index, bus in enumerate(doc.buses):
        params = bus.cost.params
        if bus.cost.family != "none" and "weight" in params and params["weight"] is None:
            drawn[index] = float(rng.uniform(low, high))
    return drawn


def _build_cost(doc: CaseDocument) -> CostModel:
    n = len(doc.buses)
    families = {bus.cost.family for bus in doc.buses} - {"none"}
    if not families:
        return CostModel.scaled(np.zeros(n))
    family = families.pop()
    drawn = _draw_weights(doc)
    first = next(bus.cost for bus in doc.buses if bus.cost.family != "none")

    if family == "quadratic":
        weights = np.zeros(n)
        lower = np.zeros(n)
        upper = np.zeros(n)
        for index, bus in enumerate(doc.buses):
            if bus.cost.family == "none":
                continue
            params = bus.cost.params
            weights[index] = params["weight"] if "weight" in params else 1.0 / params["a"]
            bounds = bus.cost.bounds or (None, None)
            lower[index] = -math.inf if bounds[0] is None else bounds[0]
            upper[index] = math.inf if bounds[1] is None else bounds[1]
        return CostModel(CostFamily.QUADRATIC, LinearResponse(1.0), weights, lower, upper)

    weights = np.zeros(n)
    for index, bus in enumerate(doc.buses):
        if bus.cost.family != "none":
            weights[index] = drawn.get(index, bus.cost.params["weight"])
    if family == "tanh":
        return CostModel.tanh(weights, first.params["k1"], int(first.params["k2"]))
    return CostModel.scaled(weights, LinearResponse(first.params.get("gain") or 1.0))


def build_case(doc: CaseDocument, source: str = "<string>", text: Optional[str] = None) -> CaseBundle:
    index_of = {bus.id: index for index, bus in enumerate(doc.buses)}
    P = []
    for bus in doc.buses:
        if bus.P is not None:
            P.append(bus.P)
        elif bus.P_mw is not None:
            P.append(bus.P_mw / doc.base_mva)
        else:
            P.append(0.0)
    branches = tuple(Branch(index_of[b.i], index_of[b.j], b.susceptance) for b in doc.branches)
    try:
        network = NetworkModel(
            kinds=tuple(bus.kind for bus in doc.buses),
            M=[bus.M for bus in doc.buses],
            D=[bus.D for bus in doc.buses],
            P=P,
            branches=branches,
            bus_ids=tuple(index_of),
            base_mva=doc.base_mva,
            name=doc.name,
        )
    except GridLabError as exc:
        line = line_of(text, "branches") if text is not None and "branch" in str(exc) else None
        raise CaseFileError(str(exc), source=source, line=line, path="branches" if line else "") from None
    try:
        cost = _build_cost(doc)
    except GridLabError as exc:
        raise CaseFileError(str(exc), source=source, path="buses") from None
    logger.info("Loaded case %s: %d buses, %d branches, %d controlled", doc.name, network.n_buses, len(branches), len(cost.controlled_idx))
    return CaseBundle(network, cost, source, doc.source_notes, doc.weights_seed)


def parse_case(text: str, source: str = "<string>") -> CaseBundle:
    doc, _ = parse_document(text, CaseDocument, source)
    return build_case(doc, source, text)


def load_case(reference: Union[str, Path], relative_to: Optional[Path] = None) -> CaseBundle:
    """Load a case from a path or a bundled name such as ``ieee39``."""
    path = resolve_bundled(reference, "cases", relative_to)
    return parse_case(path.read_text(encoding="utf-8"), str(path))


def _cost_entry(cost: CostModel, index: int) -> dict:
    weight = float(cost.weights[index])
    if weight == 0:
        return {"family": "none", "params": {}}
    if cost.family is CostFamily.QUADRATIC:
        lower, upper = float(cost.lower[index]), float(cost.upper[index])
        entry = {"family": "quadratic", "params": {"weight": weight}}
        if math.isfinite(lower) or math.isfinite(upper):
            entry["bounds"] = [lower if math.isfinite(lower) else None, upper if math.isfinite(upper) else None]
        return entry
    if isinstance(cost.base, TanhResponse):
        return {"family": "tanh", "params": {"weight": weight, "k1": cost.base.k1, "k2": cost.base.k2}}
    return {"family": "scaled", "params": {"weight": weight, "gain": cost.base.gain}}


def case_document(bundle: CaseBundle) -> dict:
    net, cost = bundle.network, bundle.cost
    buses = []
    for index, bus_id in enumerate(net.bus_ids):
        buses.append(
            {
                "id": bus_id,
                "kind": net.kinds[index].value,
                "M": float(net.M[index]),
                "D": float(net.D[index]),
                "P": float(net.P[index]),
                "cost": _cost_entry(cost, index),
            }
        )
    branches = [{"i": net.bus_ids[b.i], "j": net.bus_ids[b.j], "B": b.B} for b in net.branches]
    return {
        "schema_version": SCHEMA_VERSION,
        "document": "case",
        "name": net.name,
        "base_mva": net.base_mva,
        "source_notes": bundle.source_notes,
        "buses": buses,
        "branches": branches,
    }


def serialize_case(bundle: CaseBundle) -> str:
    """JSON text that loads back into an identical network and cost model."""
    return json.dumps(case_document(bundle), indent=2) + "\n"
