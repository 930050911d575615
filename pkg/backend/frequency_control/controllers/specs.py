"""
Controller Specifications
Immutable parameter sets for the four secondary-control architectures.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import ClassVar, Iterable, Optional, Sequence, Union

import networkx as nx
import numpy as np

from backend.frequency_control.costs.model import CostModel
from backend.frequency_control.network.model import NetworkModel
from backend.shared.utils.common import as_vector
from backend.shared.utils.errors import DimensionError, GridLabError

logger = logging.getLogger(__name__)

# multiplier turning ω in rad/s into the unit the integrators consume
FREQUENCY_SIGNAL_SCALES = {
    "rad/s": 1.0,
    "Hz": 1.0 / (2.0 * math.pi),
    "mHz": 1000.0 / (2.0 * math.pi),
}


class ControllerVariant(str, Enum):
    GATHER_BROADCAST = "gather_broadcast"
    DECENTRALIZED_INTEGRAL = "decentralized_integral"
    AGC = "agc"
    DAI = "dai"


class PassiveMode(str, Enum):
    """How passive-bus frequencies enter the broadcast measurement."""
    RESTRICT = "restrict"
    IMPLICIT = "implicit"


def _frozen(values, size: int, name: str) -> np.ndarray:
    array = np.array(as_vector(values, size, name), dtype=float)
    array.flags.writeable = False
    return array


def _check_signal_scale(scale: float) -> float:
    if not (math.isfinite(scale) and scale > 0):
        raise GridLabError(f"frequency signal scale must be positive, got {scale}")
    return float(scale)


@dataclass(frozen=True, eq=False)
class GatherBroadcastSpec:
    """k λ̇ = −Σ C_i ω_i, u_i = (J_i')⁻¹(λ), with C normalized to sum one."""

    k: float
    weights: np.ndarray
    cost: CostModel
    passive_mode: PassiveMode = PassiveMode.RESTRICT
    signal_scale: float = 1.0
    variant: ClassVar[ControllerVariant] = ControllerVariant.GATHER_BROADCAST

    def __post_init__(self) -> None:
        n = self.cost.n_buses
        object.__setattr__(self, "weights", _frozen(self.weights, n, "weights"))
        object.__setattr__(self, "passive_mode", PassiveMode(self.passive_mode))
        object.__setattr__(self, "signal_scale", _check_signal_scale(self.signal_scale))
        if not (math.isfinite(self.k) and self.k > 0):
            raise GridLabError(f"integral gain k must be positive, got {self.k}")
        if np.any(self.weights < 0) or np.any(self.weights > 1):
            raise GridLabError("measurement weights must lie in [0, 1]")
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise GridLabError("measurement weights must sum to one; build the spec with GatherBroadcastSpec.normalized")

    @classmethod
    def normalized(
        cls,
        k: float,
        weights: Sequence[float] | np.ndarray,
        cost: CostModel,
        net: Optional[NetworkModel] = None,
        passive_mode: PassiveMode | str = PassiveMode.RESTRICT,
        signal_scale: float = 1.0,
    ) -> "GatherBroadcastSpec":
        """Rescale (C, k) jointly so Σ C_i = 1; the closed loop is unchanged.

        In restrict mode the weights of passive buses are dropped before
        normalizing.
        """
        raw = np.array(as_vector(weights, cost.n_buses, "weights"), dtype=float)
        if np.any(raw < 0) or not np.all(np.isfinite(raw)):
            raise GridLabError("measurement weights must be finite and non-negative")
        mode = PassiveMode(passive_mode)
        if net is not None and mode is PassiveMode.RESTRICT and len(net.passive_idx):
            raw[net.passive_idx] = 0.0
        total = float(raw.sum())
        if total <= 0:
            raise GridLabError("measurement weights must not all be zero")
        if total == 1.0:
            return cls(k=float(k), weights=raw, cost=cost, passive_mode=mode, signal_scale=signal_scale)
        return cls(k=float(k) / total, weights=raw / total, cost=cost, passive_mode=mode, signal_scale=signal_scale)

    @property
    def state_size(self) -> int:
        return 1

    @property
    def lyapunov_gain(self) -> float:
        """Gain k' with k' λ̇ = −c_costᵀ ω when the measurement weights are proportional to the cost weights."""
        return self.k * float(self.cost.weights.sum()) / self.signal_scale


@dataclass(frozen=True, eq=False)
class DecentralizedIntegralSpec:
    """k_i λ̇_i = −(ω_i + η_i) on controlled buses, u_i = λ_i."""

    controlled: tuple[int, ...]
    gains: np.ndarray
    biases: np.ndarray
    signal_scale: float = 1.0
    variant: ClassVar[ControllerVariant] = ControllerVariant.DECENTRALIZED_INTEGRAL
    mask: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = len(self.gains)
        controlled = tuple(sorted({int(i) for i in self.controlled}))
        if not controlled:
            raise GridLabError("decentralized integral control needs at least one controlled bus")
        if controlled[0] < 0 or controlled[-1] >= n:
            raise DimensionError(f"controlled bus index outside 0..{n - 1}")
        object.__setattr__(self, "controlled", controlled)
        object.__setattr__(self, "gains", _frozen(self.gains, n, "gains"))
        object.__setattr__(self, "biases", _frozen(self.biases, n, "biases"))
        object.__setattr__(self, "signal_scale", _check_signal_scale(self.signal_scale))
        mask = np.zeros(n, dtype=bool)
        mask[list(controlled)] = True
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)
        if np.any(~(self.gains[mask] > 0)):
            raise GridLabError("integral gains on controlled buses must be positive")
        if not np.all(np.isfinite(self.biases)):
            raise GridLabError("biases must be finite")

    @classmethod
    def uniform(
        cls,
        n_buses: int,
        controlled: Iterable[int],
        k: float,
        biases: Optional[Sequence[float]] = None,
        signal_scale: float = 1.0,
    ) -> "DecentralizedIntegralSpec":
        eta = np.zeros(n_buses) if biases is None else np.asarray(biases, dtype=float)
        return cls(tuple(controlled), np.full(n_buses, float(k)), eta, signal_scale)

    @property
    def state_size(self) -> int:
        return len(self.gains)


@dataclass(frozen=True, eq=False)
class AGCSpec:
    """k λ̇ = −ω_{i*}, u_i = λ / A_i (participation = 1/A_i, zero for non-participating buses)."""

    k: float
    measurement_bus: int
    participation: np.ndarray
    signal_scale: float = 1.0
    variant: ClassVar[ControllerVariant] = ControllerVariant.AGC

    def __post_init__(self) -> None:
        n = len(self.participation)
        object.__setattr__(self, "participation", _frozen(self.participation, n, "participation"))
        object.__setattr__(self, "signal_scale", _check_signal_scale(self.signal_scale))
        if not (math.isfinite(self.k) and self.k > 0):
            raise GridLabError(f"integral gain k must be positive, got {self.k}")
        if not 0 <= int(self.measurement_bus) < n:
            raise DimensionError(f"measurement bus index {self.measurement_bus} outside 0..{n - 1}")
        object.__setattr__(self, "measurement_bus", int(self.measurement_bus))
        if np.any(self.participation < 0) or not np.any(self.participation > 0):
            raise GridLabError("participation factors must be non-negative with at least one positive entry")

    @classmethod
    def from_denominators(cls, k: float, measurement_bus: int, a: Sequence[float], signal_scale: float = 1.0) -> "AGCSpec":
        participation = np.array([0.0 if math.isinf(v) else 1.0 / v for v in a], dtype=float)
        return cls(k, measurement_bus, participation, signal_scale)

    @property
    def state_size(self) -> int:
        return 1


@dataclass(frozen=True, eq=False)
class DAISpec:
    """k_i λ̇_i = −ω_i − Σ_j w_ij (J_i'(u_i) − J_j'(u_j)), u_i = λ_i.

    ``cheaters`` report a zero marginal cost to their neighbors and ignore the
    marginal costs they receive.
    """

    gains: np.ndarray
    W: np.ndarray
    cost: CostModel
    cheaters: frozenset[int] = frozenset()
    signal_scale: float = 1.0
    variant: ClassVar[ControllerVariant] = ControllerVariant.DAI

    def __post_init__(self) -> None:
        n = self.cost.n_buses
        object.__setattr__(self, "gains", _frozen(self.gains, n, "gains"))
        W = np.array(self.W, dtype=float)
        if W.shape != (n, n):
            raise DimensionError(f"communication weights must be {n}x{n}, got {W.shape}")
        if not np.array_equal(W, W.T):
            raise GridLabError("communication weights must be symmetric")
        if np.any(W < 0) or np.any(np.diag(W) != 0):
            raise GridLabError("communication weights must be non-negative with a zero diagonal")
        controlled = self.cost.controlled
        if np.any(W[~controlled, :] != 0):
            raise GridLabError("communication edges must connect controlled buses only")
        W.flags.writeable = False
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "signal_scale", _check_signal_scale(self.signal_scale))
        cheaters = frozenset(int(c) for c in self.cheaters)
        if any(not controlled[c] for c in cheaters if 0 <= c < n) or any(not 0 <= c < n for c in cheaters):
            raise GridLabError("cheaters must be controlled buses")
        object.__setattr__(self, "cheaters", cheaters)
        if np.any(~(self.gains[controlled] > 0)):
            raise GridLabError("integral gains on controlled buses must be positive")
        idx = np.flatnonzero(controlled)
        graph = nx.Graph()
        graph.add_nodes_from(idx.tolist())
        rows, cols = np.nonzero(W)
        graph.add_edges_from(zip(rows.tolist(), cols.tolist()))
        if len(idx) > 1 and not nx.is_connected(graph):
            raise GridLabError("communication graph over the controlled buses must be connected")

    @property
    def state_size(self) -> int:
        return self.cost.n_buses

    @property
    def controlled(self) -> np.ndarray:
        return self.cost.controlled


ControllerSpec = Union[GatherBroadcastSpec, DecentralizedIntegralSpec, AGCSpec, DAISpec]


def circulant_weights(nodes: Sequence[int], n_buses: int, offsets: Sequence[int], weight: float) -> np.ndarray:
    """Symmetric communication weights linking node m to m ± offset (mod len(nodes))."""
    W = np.zeros((n_buses, n_buses))
    count = len(nodes)
    for position, node in enumerate(nodes):
        for offset in offsets:
            if offset % count == 0:
                continue
            other = nodes[(position + offset) % count]
            W[node, other] = weight
            W[other, node] = weight
    return W


def network_weights(net: NetworkModel, nodes: Sequence[int], weight: float) -> np.ndarray:
    """Communication along transmission branches between the given nodes."""
    W = np.zeros((net.n_buses, net.n_buses))
    for i, j in net.graph().subgraph([int(n) for n in nodes]).edges():
        W[i, j] = weight
        W[j, i] = weight
    return W
