"""Pydantic schemas for case and scenario documents."""

from __future__ import annotations

import math
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

SCHEMA_VERSION = "1"

BUS_KINDS = ("generator", "frequency_responsive", "passive")
COST_PARAMS = {
    "quadratic": ({"a", "weight"}, set()),
    "scaled": ({"weight"}, {"gain"}),
    "tanh": ({"weight", "k1", "k2"}, set()),
    "none": (set(), set()),
}


class CostEntry(BaseModel):
    """Per-bus cost description.

    Examples:
        >>> CostEntry(family="quadratic", params={"a": 2.0}).params
        {'a': 2.0}
        >>> CostEntry().family
        'none'
    """

    family: Literal["quadratic", "scaled", "tanh", "none"] = Field("none", description="Cost family of the bus.")
    params: Dict[str, Optional[float]] = Field(default_factory=dict, description="Family parameters.")
    bounds: Optional[Tuple[Optional[float], Optional[float]]] = Field(
        None, description="Injection bounds [lower, upper] for quadratic costs; null means unbounded."
    )

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _validate_params(self) -> "CostEntry":
        """Check the parameter names and ranges of each family.

        Examples:
            >>> CostEntry(family="tanh", params={"weight": 0.5, "k1": 1.0, "k2": 3}).params["k2"]
            3.0
        """

        allowed, optional = COST_PARAMS[self.family]
        keys = set(self.params)
        if self.family == "quadratic":
            if len(keys & {"a", "weight"}) != 1 or keys - {"a", "weight"}:
                raise ValueError("quadratic cost needs exactly one of params.a or params.weight")
        else:
            missing = allowed - keys
            unknown = keys - allowed - optional
            if missing:
                raise ValueError(f"{self.family} cost is missing params {sorted(missing)}")
            if unknown:
                raise ValueError(f"{self.family} cost does not accept params {sorted(unknown)}")

        a = self.params.get("a")
        if "a" in self.params and (a is None or not a > 0):
            raise ValueError("quadratic coefficient a must be positive")
        weight = self.params.get("weight")
        if weight is not None and (not math.isfinite(weight) or weight < 0):
            raise ValueError("weight must be finite and non-negative (null draws it from weights_range)")
        if self.family == "quadratic" and "weight" in self.params and weight is None:
            raise ValueError("quadratic weight must be given explicitly")
        for name in ("gain", "k1"):
            value = self.params.get(name)
            if name in self.params and (value is None or not value > 0):
                raise ValueError(f"{name} must be positive")
        if "k2" in self.params:
            k2 = self.params["k2"]
            if k2 is None or k2 != int(k2) or int(k2) < 1 or int(k2) % 2 == 0:
                raise ValueError("k2 must be an odd positive integer")

        if self.bounds is not None:
            if self.family != "quadratic":
                raise ValueError("bounds are only accepted for quadratic costs")
            lower = -math.inf if self.bounds[0] is None else self.bounds[0]
            upper = math.inf if self.bounds[1] is None else self.bounds[1]
            if not lower <= 0 <= upper or not lower < upper:
                raise ValueError("bounds must satisfy lower <= 0 <= upper and lower < upper")
        return self


class BusEntry(BaseModel):
    """One bus of a case document.

    Examples:
        >>> BusEntry(id=1, kind="generator", M=2.0, D=1.0, P=0.5).P
        0.5
    """

    id: int = Field(..., description="External bus id.")
    kind: Literal["generator", "frequency_responsive", "passive"]
    M: float = Field(0.0, description="Inertia (generators only).")
    D: float = Field(0.0, description="Droop/damping coefficient.")
    P: Optional[float] = Field(None, description="Fixed injection in per-unit.")
    P_mw: Optional[float] = Field(None, description="Fixed injection in MW, converted with base_mva.")
    cost: CostEntry = Field(default_factory=CostEntry)

    model_config = ConfigDict(extra="forbid")

    @field_validator("M", "D")
    @classmethod
    def _validate_non_negative(cls, value: float, info: ValidationInfo) -> float:
        """Inertia and damping are non-negative.

        Examples:
            >>> BusEntry(id=2, kind="passive").D
            0.0
        """

        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{info.field_name} must be finite and non-negative")
        return value

    @model_validator(mode="after")
    def _validate_kind(self) -> "BusEntry":
        if self.P is not None and self.P_mw is not None:
            raise ValueError("give either P or P_mw, not both")
        if self.kind == "generator" and not (self.M > 0 and self.D > 0):
            raise ValueError("generator buses need M > 0 and D > 0")
        if self.kind == "frequency_responsive" and not (self.M == 0 and self.D > 0):
            raise ValueError("frequency-responsive buses need M = 0 and D > 0")
        if self.kind == "passive" and not (self.M == 0 and self.D == 0):
            raise ValueError("passive buses need M = 0 and D = 0")
        return self


class BranchEntry(BaseModel):
    """Transmission branch given by susceptance B or reactance x.

    Examples:
        >>> BranchEntry(i=1, j=2, x=0.5).susceptance
        2.0
    """

    i: int
    j: int
    B: Optional[float] = Field(None, description="Susceptance in per-unit.")
    x: Optional[float] = Field(None, description="Reactance in per-unit; B = 1/x.")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _validate_branch(self) -> "BranchEntry":
        if (self.B is None) == (self.x is None):
            raise ValueError("give exactly one of B or x")
        value = self.B if self.B is not None else self.x
        if not (math.isfinite(value) and value > 0):
            raise ValueError("B and x must be positive")
        if self.i == self.j:
            raise ValueError("branch endpoints must differ")
        return self

    @property
    def susceptance(self) -> float:
        return float(self.B) if self.B is not None else 1.0 / float(self.x)


class CaseDocument(BaseModel):
    """Network and cost description of a test system."""

    schema_version: Literal["1"]
    document: Literal["case"]
    name: str
    base_mva: float = Field(100.0, description="Per-unit power base in MVA.")
    source_notes: str = ""
    weights_seed: Optional[int] = Field(None, description="Seed for cost weights given as null.")
    weights_range: Tuple[float, float] = Field((0.0, 1.0), description="Uniform range for drawn cost weights.")
    buses: List[BusEntry] = Field(..., min_length=1)
    branches: List[BranchEntry] = Field(default_factory=list)

    model_config = ConfigDict(extra="forbid")

    @field_validator("base_mva")
    @classmethod
    def _validate_base(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("base_mva must be positive")
        return value

    @field_validator("weights_range")
    @classmethod
    def _validate_range(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        """Drawn weights must be non-negative."""

        low, high = value
        if not 0 <= low < high:
            raise ValueError("weights_range must satisfy 0 <= low < high")
        return value

    @model_validator(mode="after")
    def _validate_references(self) -> "CaseDocument":
        ids = [bus.id for bus in self.buses]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise ValueError(f"duplicate bus ids {duplicates}")
        known = set(ids)
        for index, branch in enumerate(self.branches):
            missing = [b for b in (branch.i, branch.j) if b not in known]
            if missing:
                raise ValueError(f"branch {index} ({branch.i}-{branch.j}) references unknown bus {missing[0]}")
        families = {bus.cost.family for bus in self.buses} - {"none"}
        if len(families) > 1:
            raise ValueError(f"controlled buses must share one cost family, got {sorted(families)}")
        if families & {"scaled", "tanh"}:
            shared = {tuple(sorted((k, v) for k, v in bus.cost.params.items() if k != "weight")) for bus in self.buses if bus.cost.family != "none"}
            if len(shared) > 1:
                raise ValueError("scaled and tanh costs must share their base parameters (gain, k1, k2) across buses")
        drawn = any(bus.cost.family != "none" and "weight" in bus.cost.params and bus.cost.params["weight"] is None for bus in self.buses)
        if drawn and self.weights_seed is None:
            raise ValueError("weights given as null need a weights_seed")
        return self


class DisturbanceEntry(BaseModel):
    """Step change of the fixed injection at one bus.

    Examples:
        >>> DisturbanceEntry(t=1.0, bus=4, delta_p_mw=-33.0).delta_p is None
        True
    """

    t: float
    bus: int
    delta_p: Optional[float] = Field(None, description="Step in per-unit.")
    delta_p_mw: Optional[float] = Field(None, description="Step in MW, converted with the case base_mva.")

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _validate_amount(self) -> "DisturbanceEntry":
        if (self.delta_p is None) == (self.delta_p_mw is None):
            raise ValueError("give exactly one of delta_p or delta_p_mw")
        if not (math.isfinite(self.t) and self.t >= 0):
            raise ValueError("disturbance time must be finite and non-negative")
        return self


class IntegratorEntry(BaseModel):
    dt: Optional[float] = None
    newton_tol: Optional[float] = None
    newton_max_iter: Optional[int] = None
    record_every: int = 1

    model_config = ConfigDict(extra="forbid")


class OutputsEntry(BaseModel):
    csv: Optional[str] = None
    summary: Optional[str] = None

    model_config = ConfigDict(extra="forbid")


class OneHotWeights(BaseModel):
    one_hot: int

    model_config = ConfigDict(extra="forbid")


class GaussianBiases(BaseModel):
    """Biases drawn from N(mean, std²) with the scenario seed."""

    gaussian: bool = True
    mean: float = 0.0
    std: float = 1.0

    model_config = ConfigDict(extra="forbid")

    @field_validator("std")
    @classmethod
    def _validate_std(cls, value: float) -> float:
        if not value >= 0:
            raise ValueError("std must be non-negative")
        return value


class CostOverride(BaseModel):
    """Replace the base response of the case costs, keeping their weights.

    Examples:
        >>> CostOverride(family="tanh", k1=1.0, k2=3).k2
        3
    """

    family: Literal["scaled", "tanh"]
    gain: Optional[float] = None
    k1: Optional[float] = None
    k2: Optional[int] = None

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _validate_fields(self) -> "CostOverride":
        if self.family == "tanh":
            if self.gain is not None:
                raise ValueError("tanh overrides take k1 and k2, not gain")
            if self.k1 is not None and not self.k1 > 0:
                raise ValueError("k1 must be positive")
            if self.k2 is not None and (self.k2 < 1 or self.k2 % 2 == 0):
                raise ValueError("k2 must be an odd positive integer")
        elif self.k1 is not None or self.k2 is not None:
            raise ValueError("scaled overrides take gain only")
        elif self.gain is not None and not self.gain > 0:
            raise ValueError("gain must be positive")
        return self


class TopologyCommunication(BaseModel):
    topology: Literal["network", "circulant"]
    offsets: List[int] = Field(default_factory=lambda: [1])
    weight: float = 1.0

    model_config = ConfigDict(extra="forbid")

    @field_validator("weight")
    @classmethod
    def _validate_weight(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("communication weight must be positive")
        return value


class EdgeCommunication(BaseModel):
    edges: List[Tuple[int, int, float]]

    model_config = ConfigDict(extra="forbid")


VARIANT_FIELDS = {
    "gather_broadcast": {"weights", "passive_mode", "cost_override"},
    "decentralized_integral": {"controlled", "gains", "biases"},
    "agc": {"measurement_bus", "participation"},
    "dai": {"communication", "cheaters", "gains", "cost_override"},
}


class ControllerEntry(BaseModel):
    """Controller section; fields outside the chosen variant are rejected.

    Examples:
        >>> ControllerEntry(variant="agc", measurement_bus=39).participation
        'cost'
    """

    variant: Literal["gather_broadcast", "decentralized_integral", "agc", "dai"]
    k: Optional[float] = Field(None, description="Integral gain; defaults to GRID_LAB_INTEGRAL_GAIN.")
    frequency_signal: Literal["rad/s", "Hz", "mHz"] = Field("rad/s", description="Unit of the integrated frequency signal.")
    weights: Optional[Union[Literal["cost", "uniform", "damping"], List[float], OneHotWeights]] = None
    passive_mode: Optional[Literal["restrict", "implicit"]] = None
    cost_override: Optional[CostOverride] = None
    controlled: Optional[Union[Literal["all", "generators"], List[int]]] = None
    gains: Optional[List[float]] = None
    biases: Optional[Union[GaussianBiases, List[float], Dict[str, float]]] = Field(None, union_mode="left_to_right")
    measurement_bus: Optional[int] = None
    participation: Optional[Union[Literal["cost"], List[float]]] = None
    communication: Optional[Union[TopologyCommunication, EdgeCommunication]] = None
    cheaters: Optional[List[int]] = None

    model_config = ConfigDict(extra="forbid")

    @field_validator("k")
    @classmethod
    def _validate_gain(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not (math.isfinite(value) and value > 0):
            raise ValueError("k must be positive")
        return value

    @model_validator(mode="after")
    def _validate_variant(self) -> "ControllerEntry":
        variant_specific = set().union(*VARIANT_FIELDS.values())
        given = {name for name in variant_specific if getattr(self, name) is not None}
        foreign = given - VARIANT_FIELDS[self.variant]
        if foreign:
            raise ValueError(f"fields {sorted(foreign)} do not apply to the {self.variant} controller")
        if self.variant == "gather_broadcast":
            self.weights = "cost" if self.weights is None else self.weights
            self.passive_mode = self.passive_mode or "restrict"
        elif self.variant == "decentralized_integral":
            self.controlled = self.controlled or "generators"
        elif self.variant == "agc":
            if self.measurement_bus is None:
                raise ValueError("agc needs measurement_bus")
            self.participation = self.participation or "cost"
        elif self.variant == "dai":
            if self.communication is None:
                raise ValueError("dai needs a communication section")
            self.cheaters = self.cheaters or []
        return self


class PerturbationEntry(BaseModel):
    """Offsets added to the initial equilibrium, keyed by bus id."""

    theta: Dict[str, float] = Field(default_factory=dict)
    omega: Dict[str, float] = Field(default_factory=dict)
    ctrl: Optional[float] = Field(None, description="Offset added to every controller state entry.")

    model_config = ConfigDict(extra="forbid")


class ScenarioDocument(BaseModel):
    """Experiment description: case, controller, disturbances and outputs."""

    schema_version: Literal["1"]
    document: Literal["scenario"]
    id: str
    case: str = Field(..., description="Bundled case name or a path relative to the scenario file.")
    controller: ControllerEntry
    disturbances: List[DisturbanceEntry] = Field(default_factory=list)
    horizon: float
    integrator: IntegratorEntry = Field(default_factory=IntegratorEntry)
    seed: int = 0
    settle_threshold: Optional[float] = None
    perturbation: Optional[PerturbationEntry] = None
    outputs: OutputsEntry = Field(default_factory=OutputsEntry)

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _validate_times(self) -> "ScenarioDocument":
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ValueError("horizon must be positive")
        late = [d.t for d in self.disturbances if d.t > self.horizon]
        if late:
            raise ValueError(f"disturbance times {late} lie beyond the horizon {self.horizon}")
        if self.settle_threshold is not None and not self.settle_threshold > 0:
            raise ValueError("settle_threshold must be positive")
        return self
