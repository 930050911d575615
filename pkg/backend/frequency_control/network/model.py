"""
Network Model
Immutable transmission-network description: bus roles, inertia, damping,
fixed injections and branch susceptances.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import NamedTuple, Sequence

import networkx as nx
import numpy as np

from backend.shared.utils.common import as_vector
from backend.shared.utils.errors import DimensionError, GridLabError

logger = logging.getLogger(__name__)


class BusKind(str, Enum):
    """Role of a bus in the swing/droop/algebraic model."""
    GENERATOR = "generator"
    FREQUENCY_RESPONSIVE = "frequency_responsive"
    PASSIVE = "passive"


class Branch(NamedTuple):
    i: int
    j: int
    B: float


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class NetworkModel:
    """Lossless network in per-unit on ``base_mva``.

    Buses are addressed by 0-based index internally; ``bus_ids`` keeps the
    external labels used by case and scenario files.
    """

    kinds: tuple[BusKind, ...]
    M: np.ndarray
    D: np.ndarray
    P: np.ndarray
    branches: tuple[Branch, ...]
    bus_ids: tuple[int, ...] = ()
    base_mva: float = 100.0
    name: str = "network"
    branch_from: np.ndarray = field(init=False, repr=False)
    branch_to: np.ndarray = field(init=False, repr=False)
    branch_b: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = len(self.kinds)
        if n == 0:
            raise DimensionError("network must have at least one bus")
        kinds = tuple(BusKind(kind) for kind in self.kinds)
        object.__setattr__(self, "kinds", kinds)
        object.__setattr__(self, "M", _frozen(as_vector(self.M, n, "M")))
        object.__setattr__(self, "D", _frozen(as_vector(self.D, n, "D")))
        object.__setattr__(self, "P", _frozen(as_vector(self.P, n, "P")))
        bus_ids = tuple(int(b) for b in self.bus_ids) if self.bus_ids else tuple(range(1, n + 1))
        if len(bus_ids) != n:
            raise DimensionError(f"bus_ids must have {n} entries, got {len(bus_ids)}")
        if len(set(bus_ids)) != n:
            raise GridLabError("bus ids must be unique")
        object.__setattr__(self, "bus_ids", bus_ids)
        if not np.all(np.isfinite(self.P)):
            raise GridLabError("fixed injections P must be finite")

        for idx, kind in enumerate(kinds):
            m, d = self.M[idx], self.D[idx]
            if kind is BusKind.GENERATOR and not (m > 0 and d > 0):
                raise GridLabError(f"generator bus {bus_ids[idx]} needs M > 0 and D > 0 (got M={m}, D={d})")
            if kind is BusKind.FREQUENCY_RESPONSIVE and not (m == 0 and d > 0):
                raise GridLabError(f"frequency-responsive bus {bus_ids[idx]} needs M = 0 and D > 0 (got M={m}, D={d})")
            if kind is BusKind.PASSIVE and not (m == 0 and d == 0):
                raise GridLabError(f"passive bus {bus_ids[idx]} needs M = 0 and D = 0 (got M={m}, D={d})")
        if all(kind is BusKind.PASSIVE for kind in kinds):
            raise GridLabError("at least one bus must be a generator or frequency-responsive bus")

        branches = []
        seen: set[frozenset[int]] = set()
        for branch in self.branches:
            i, j, b = int(branch[0]), int(branch[1]), float(branch[2])
            if not (0 <= i < n and 0 <= j < n):
                raise GridLabError(f"branch ({i}, {j}) references a bus outside 0..{n - 1}")
            if i == j:
                raise GridLabError(f"branch ({bus_ids[i]}, {bus_ids[j]}) is a self loop")
            if not (np.isfinite(b) and b > 0):
                raise GridLabError(f"branch ({bus_ids[i]}, {bus_ids[j]}) needs a positive susceptance, got {b}")
            key = frozenset((i, j))
            if key in seen:
                raise GridLabError(f"branch ({bus_ids[i]}, {bus_ids[j]}) is listed twice")
            seen.add(key)
            branches.append(Branch(i, j, b))
        object.__setattr__(self, "branches", tuple(branches))

        graph = self.graph()
        if not nx.is_connected(graph):
            parts = [sorted(bus_ids[k] for k in comp) for comp in nx.connected_components(graph)]
            raise GridLabError(f"branch graph is disconnected: components {parts}")

        branch_from = np.array([b.i for b in branches], dtype=int)
        branch_to = np.array([b.j for b in branches], dtype=int)
        branch_from.flags.writeable = False
        branch_to.flags.writeable = False
        object.__setattr__(self, "branch_from", branch_from)
        object.__setattr__(self, "branch_to", branch_to)
        object.__setattr__(self, "branch_b", _frozen(np.array([b.B for b in branches], dtype=float)))
        logger.debug("Built network %s with %d buses and %d branches", self.name, n, len(branches))

    @property
    def n_buses(self) -> int:
        return len(self.kinds)

    def _indices(self, *kinds: BusKind) -> np.ndarray:
        return np.array([i for i, kind in enumerate(self.kinds) if kind in kinds], dtype=int)

    @cached_property
    def generator_idx(self) -> np.ndarray:
        return self._indices(BusKind.GENERATOR)

    @cached_property
    def responsive_idx(self) -> np.ndarray:
        return self._indices(BusKind.FREQUENCY_RESPONSIVE)

    @cached_property
    def passive_idx(self) -> np.ndarray:
        return self._indices(BusKind.PASSIVE)

    @cached_property
    def dynamic_idx(self) -> np.ndarray:
        """Buses with a differential angle state (G ∪ F), in bus order."""
        return self._indices(BusKind.GENERATOR, BusKind.FREQUENCY_RESPONSIVE)

    @property
    def total_damping(self) -> float:
        return float(self.D[self.dynamic_idx].sum())

    def index_of(self, bus_id: int) -> int:
        """Translate an external bus id into its 0-based index."""
        try:
            return self.bus_ids.index(int(bus_id))
        except ValueError:
            raise GridLabError(f"unknown bus id {bus_id}") from None

    def graph(self) -> nx.Graph:
        """Branch graph on bus indices, edges weighted by susceptance."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_buses))
        graph.add_weighted_edges_from((b.i, b.j, b.B) for b in self.branches)
        return graph

    def with_injections(self, P: Sequence[float] | np.ndarray) -> "NetworkModel":
        """Copy of the network with a different fixed-injection vector."""
        return dataclasses.replace(self, P=np.asarray(P, dtype=float))

    def check_dimension(self, vector: Sequence[float] | np.ndarray, name: str = "vector") -> np.ndarray:
        return as_vector(vector, self.n_buses, name)
