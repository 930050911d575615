"""
Scenario Files
Scenario documents turned into runnable experiments: case, controller spec,
disturbances, integrator settings and output locations.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from backend.frequency_control.controllers.specs import (
    FREQUENCY_SIGNAL_SCALES,
    AGCSpec,
    ControllerSpec,
    DAISpec,
    DecentralizedIntegralSpec,
    GatherBroadcastSpec,
    circulant_weights,
    network_weights,
)
from backend.frequency_control.costs.model import CostFamily, CostModel
from backend.frequency_control.costs.responses import LinearResponse, TanhResponse
from backend.frequency_control.dynamics.integrator import Disturbance
from backend.frequency_control.dynamics.state import IntegratorConfig
from backend.frequency_control.harness.cases import CaseBundle, load_case
from backend.frequency_control.harness.documents import line_of, parse_document, resolve_bundled
from backend.frequency_control.harness.schemas import ControllerEntry, OneHotWeights, PerturbationEntry, ScenarioDocument
from backend.frequency_control.network.model import NetworkModel
from backend.shared.utils.config import grid_setting
from backend.shared.utils.errors import CaseFileError, GridLabError, ScenarioError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Scenario:
    id: str
    case: CaseBundle
    controller: ControllerSpec
    disturbances: tuple[Disturbance, ...]
    horizon: float
    integrator: IntegratorConfig
    seed: int
    settle_threshold: Optional[float] = None
    perturbation: Optional[PerturbationEntry] = None
    csv_path: Optional[Path] = None
    summary_path: Optional[Path] = None
    document: Optional[ScenarioDocument] = None
    source: str = "<string>"

    @property
    def network(self) -> NetworkModel:
        return self.case.network

    @property
    def cost(self) -> CostModel:
        return self.case.cost

    @property
    def variant(self) -> str:
        return self.controller.variant.value

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


def _indices(net: NetworkModel, ids, what: str) -> list[int]:
    try:
        return [net.index_of(i) for i in ids]
    except GridLabError as exc:
        raise ScenarioError(f"{what}: {exc}") from None


def _aligned(values, size: int, what: str) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.shape != (size,):
        raise ScenarioError(f"{what} must have {size} entries, got {len(values)}")
    return array


def _cost_for(entry: ControllerEntry, cost: CostModel) -> CostModel:
    override = entry.cost_override
    if override is None:
        return cost
    if override.family == "tanh":
        return cost.with_base(TanhResponse(override.k1 or 1.0, override.k2 or 1))
    return cost.with_base(LinearResponse(override.gain or 1.0))


def _gather_broadcast(entry: ControllerEntry, net: NetworkModel, cost: CostModel, k: float, scale: float) -> GatherBroadcastSpec:
    weights = entry.weights
    n = net.n_buses
    if weights == "cost":
        raw = cost.weights.copy()
    elif weights == "uniform":
        raw = np.ones(n)
    elif weights == "damping":
        raw = net.D.copy()
    elif isinstance(weights, OneHotWeights):
        raw = np.zeros(n)
        raw[_indices(net, [weights.one_hot], "weights.one_hot")[0]] = 1.0
    else:
        raw = _aligned(weights, n, "controller.weights")
    return GatherBroadcastSpec.normalized(k, raw, cost, net, entry.passive_mode, scale)


def _decentralized(
    entry: ControllerEntry, net: NetworkModel, k: float, scale: float, rng: np.random.Generator
) -> DecentralizedIntegralSpec:
    n = net.n_buses
    if entry.controlled == "all":
        controlled = [int(i) for i in net.dynamic_idx]
    elif entry.controlled == "generators":
        controlled = [int(i) for i in net.generator_idx]
    else:
        controlled = _indices(net, entry.controlled, "controller.controlled")
    controlled = sorted(set(controlled))

    gains = np.full(n, float(k))
    if entry.gains is not None:
        gains[controlled] = _aligned(entry.gains, len(controlled), "controller.gains")

    biases = np.zeros(n)
    if isinstance(entry.biases, dict):
        for bus_id, value in entry.biases.items():
            index = _indices(net, [int(bus_id)], "controller.biases")[0]
            if index not in controlled:
                raise ScenarioError(f"controller.biases: bus {bus_id} is not controlled")
            biases[index] = value
    elif isinstance(entry.biases, list):
        biases[controlled] = _aligned(entry.biases, len(controlled), "controller.biases")
    elif entry.biases is not None:
        biases[controlled] = rng.normal(entry.biases.mean, entry.biases.std, size=len(controlled))
        logger.info("Drew measurement biases %s", np.array2string(biases[controlled], precision=4))
    return DecentralizedIntegralSpec(tuple(controlled), gains, biases, scale)


def _agc(entry: ControllerEntry, net: NetworkModel, cost: CostModel, k: float, scale: float) -> AGCSpec:
    measurement = _indices(net, [entry.measurement_bus], "controller.measurement_bus")[0]
    if entry.participation == "cost":
        if cost.family is CostFamily.TANH:
            raise ScenarioError("controller.participation: AGC participation from costs needs linear responses")
        participation = cost.weights * cost.base.slope_bound()
    else:
        participation = _aligned(entry.participation, net.n_buses, "controller.participation")
    return AGCSpec(k, measurement, participation, scale)


def _dai(entry: ControllerEntry, net: NetworkModel, cost: CostModel, k: float, scale: float) -> DAISpec:
    n = net.n_buses
    nodes = [int(i) for i in cost.controlled_idx]
    communication = entry.communication
    if hasattr(communication, "edges"):
        W = np.zeros((n, n))
        for i, j, weight in communication.edges:
            a, b = _indices(net, [i, j], "controller.communication.edges")
            W[a, b] = W[b, a] = weight
    elif communication.topology == "network":
        W = network_weights(net, nodes, communication.weight)
    else:
        W = circulant_weights(nodes, n, communication.offsets, communication.weight)

    gains = np.full(n, float(k))
    if entry.gains is not None:
        gains[nodes] = _aligned(entry.gains, len(nodes), "controller.gains")
    cheaters = frozenset(_indices(net, entry.cheaters or [], "controller.cheaters"))
    return DAISpec(gains, W, cost, cheaters, scale)


def build_controller(entry: ControllerEntry, bundle: CaseBundle, rng: Optional[np.random.Generator] = None) -> ControllerSpec:
    """Controller spec for a validated controller section; the cost model comes from the case."""
    rng = rng or np.random.default_rng(0)
    net = bundle.network
    k = float(entry.k if entry.k is not None else grid_setting("GRID_LAB_INTEGRAL_GAIN"))
    scale = FREQUENCY_SIGNAL_SCALES[entry.frequency_signal]
    cost = _cost_for(entry, bundle.cost)
    try:
        if entry.variant == "gather_broadcast":
            return _gather_broadcast(entry, net, cost, k, scale)
        if entry.variant == "decentralized_integral":
            return _decentralized(entry, net, k, scale, rng)
        if entry.variant == "agc":
            return _agc(entry, net, cost, k, scale)
        return _dai(entry, net, cost, k, scale)
    except ScenarioError:
        raise
    except GridLabError as exc:
        raise ScenarioError(str(exc), path="controller") from None


def _integrator(doc: ScenarioDocument, overrides: dict[str, Any]) -> IntegratorConfig:
    section = doc.integrator
    values = {
        "dt": overrides.get("dt") or section.dt,
        "newton_tol": section.newton_tol,
        "newton_max_iter": section.newton_max_iter,
        "record_every": section.record_every,
    }
    return IntegratorConfig(**{key: value for key, value in values.items() if value is not None})


def _output_path(value: Optional[str], base: Optional[Path], out_dir: Optional[Path], default_name: str) -> Optional[Path]:
    """--out wins, then the document's own path, then the configured output directory."""
    if out_dir is not None:
        return out_dir / (Path(value).name if value else default_name)
    if value is None:
        configured = grid_setting("GRID_LAB_OUTPUT_DIR")
        return Path(configured) / default_name if configured else None
    path = Path(value)
    if path.is_absolute() or base is None:
        return path
    return base / path


def build_scenario(
    doc: ScenarioDocument,
    source: str = "<string>",
    text: Optional[str] = None,
    base_dir: Optional[Path] = None,
    overrides: Optional[dict[str, Any]] = None,
    case: Optional[CaseBundle] = None,
) -> Scenario:
    """Resolve a validated document; ``overrides`` (seed, dt, horizon, out) win over document fields."""
    overrides = {key: value for key, value in (overrides or {}).items() if value is not None}
    if "seed" in overrides or "horizon" in overrides:
        doc = doc.model_copy(update={key: overrides[key] for key in ("seed", "horizon") if key in overrides})
    horizon = float(doc.horizon)

    if case is None:
        try:
            case = load_case(doc.case, relative_to=base_dir)
        except CaseFileError as exc:
            if exc.source == doc.case:
                line = line_of(text, "case") if text else None
                raise ScenarioError(f"case {doc.case!r} not found", source=source, line=line, path="case") from None
            raise
    net = case.network

    disturbances = []
    for index, entry in enumerate(doc.disturbances):
        if entry.t > horizon:
            raise ScenarioError(f"disturbance time {entry.t} lies beyond the horizon {horizon}", source=source, path=f"disturbances[{index}].t")
        try:
            bus = net.index_of(entry.bus)
        except GridLabError as exc:
            line = line_of(text, "disturbances", index, "bus") if text else None
            raise ScenarioError(str(exc), source=source, line=line, path=f"disturbances[{index}].bus") from None
        delta = entry.delta_p if entry.delta_p is not None else entry.delta_p_mw / net.base_mva
        disturbances.append(Disturbance(float(entry.t), bus, float(delta)))

    rng = np.random.default_rng(doc.seed)
    try:
        controller = build_controller(doc.controller, case, rng)
    except ScenarioError as exc:
        line = line_of(text, "controller") if text else None
        raise ScenarioError(exc.detail, source=source, line=line, path=exc.path or "controller") from None

    if doc.perturbation is not None:
        for bus_id in list(doc.perturbation.theta) + list(doc.perturbation.omega):
            try:
                net.index_of(int(bus_id))
            except (GridLabError, ValueError):
                raise ScenarioError(f"unknown bus id {bus_id}", source=source, path="perturbation") from None

    out_dir = Path(overrides["out"]) if "out" in overrides else None
    scenario = Scenario(
        id=doc.id,
        case=case,
        controller=controller,
        disturbances=tuple(disturbances),
        horizon=horizon,
        integrator=_integrator(doc, overrides),
        seed=doc.seed,
        settle_threshold=doc.settle_threshold,
        perturbation=doc.perturbation,
        csv_path=_output_path(doc.outputs.csv, base_dir, out_dir, f"{doc.id}.csv"),
        summary_path=_output_path(doc.outputs.summary, base_dir, out_dir, f"{doc.id}.summary.txt"),
        document=doc,
        source=source,
    )
    logger.info(
        "Loaded scenario %s: %s on %s, %d disturbances (total %+.6g pu), horizon %.6g s",
        scenario.id,
        scenario.variant,
        net.name,
        len(disturbances),
        sum(d.delta_p for d in disturbances),
        horizon,
    )
    return scenario


def parse_scenario(
    text: str,
    source: str = "<string>",
    base_dir: Optional[Path] = None,
    overrides: Optional[dict[str, Any]] = None,
) -> Scenario:
    doc, _ = parse_document(text, ScenarioDocument, source, ScenarioError)
    return build_scenario(doc, source, text, base_dir, overrides)


def load_scenario(reference: Union[str, Path], overrides: Optional[dict[str, Any]] = None) -> Scenario:
    """Load a scenario from a path or a bundled name such as ``ne_step_gather_broadcast``."""
    try:
        path = resolve_bundled(reference, "scenarios")
    except CaseFileError as exc:
        raise ScenarioError("no such scenario file or bundled name", source=exc.source) from None
    return parse_scenario(path.read_text(encoding="utf-8"), str(path), path.parent, overrides)


def with_controller(scenario: Scenario, entry: ControllerEntry) -> Scenario:
    """Same experiment under a different controller section."""
    controller = build_controller(entry, scenario.case, np.random.default_rng(scenario.seed))
    return scenario.replace(controller=controller)
