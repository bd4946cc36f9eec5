"""Fleet-conversion instance model.

An instance holds tours with fixed time windows, vehicle models with
purchase and per-tour operating costs, and an optional travel-time matrix
between locations.  From an instance we derive the tour incompatibility
graph: two tours conflict when no single vehicle can run one after the
other in either order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

__all__ = [
    "InstanceError",
    "ParseError",
    "Tour",
    "VehicleModel",
    "FleetInstance",
    "IncompatibilityGraph",
    "build_incompatibility_graph",
    "generate_instance",
    "read_instance",
    "write_instance",
]


class InstanceError(ValueError):
    """Instance data violates a structural invariant."""


class ParseError(InstanceError):
    """An instance file does not match the expected schema."""


@dataclass(frozen=True)
class Tour:
    """A task with a fixed time window that exactly one vehicle must run.

    ``allowed_models`` restricts which vehicle models may be assigned to
    the tour.  Locations are optional; without them (and without a
    travel-time matrix) only window overlap decides conflicts.
    """

    id: int
    t_d: float
    t_a: float
    allowed_models: frozenset[int]
    l_d: int | None = None
    l_a: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "allowed_models", frozenset(self.allowed_models))
        if self.id < 0:
            raise InstanceError(f"tour id {self.id} is negative")
        if self.t_d < 0:
            raise InstanceError(f"tour {self.id}: t_d is negative")
        if not self.t_a > self.t_d:
            raise InstanceError(
                f"tour {self.id}: t_a ({self.t_a}) must be greater than t_d ({self.t_d})"
            )
        if not self.allowed_models:
            raise InstanceError(f"tour {self.id}: allowed_models is empty")


@dataclass(frozen=True)
class VehicleModel:
    """A vehicle model with a purchase cost and per-tour operating costs."""

    id: int
    purchase_cost: float
    op_cost: dict[int, float]

    def __post_init__(self):
        if not self.purchase_cost > 0:
            raise InstanceError(f"model {self.id}: purchase_cost must be positive")
        for tour_id, cost in self.op_cost.items():
            if cost < 0:
                raise InstanceError(f"model {self.id}: op_cost[{tour_id}] is negative")


@dataclass
class FleetInstance:
    """Tours, vehicle models, and an optional location travel-time matrix.

    Immutable by convention after construction; all invariants are checked
    here so downstream code can rely on them.
    """

    tours: list[Tour]
    models: list[VehicleModel]
    travel_time: list[list[float]] | None = None
    _models_by_id: dict[int, VehicleModel] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        if not self.tours:
            raise InstanceError("instance has no tours")
        if not self.models:
            raise InstanceError("instance has no models")
        for pos, tour in enumerate(self.tours):
            if tour.id != pos:
                raise InstanceError(
                    f"tour ids must be 0..{len(self.tours) - 1} contiguous; "
                    f"position {pos} holds id {tour.id}"
                )
        model_ids = {m.id for m in self.models}
        if len(model_ids) != len(self.models):
            raise InstanceError("duplicate model ids")
        for tour in self.tours:
            unknown = tour.allowed_models - model_ids
            if unknown:
                raise InstanceError(
                    f"tour {tour.id}: allowed_models references unknown models {sorted(unknown)}"
                )
        for model in self.models:
            for tour in self.tours:
                if tour.id not in model.op_cost:
                    raise InstanceError(f"model {model.id}: op_cost missing tour {tour.id}")
        if self.travel_time is not None:
            size = len(self.travel_time)
            for i, row in enumerate(self.travel_time):
                if len(row) != size:
                    raise InstanceError("travel_time must be a square matrix")
                if row[i] != 0:
                    raise InstanceError(f"travel_time[{i}][{i}] must be zero")
                for j, value in enumerate(row):
                    if value < 0:
                        raise InstanceError(f"travel_time[{i}][{j}] is negative")
        self._models_by_id = {m.id: m for m in self.models}

    @property
    def n_tours(self) -> int:
        return len(self.tours)

    @property
    def n_models(self) -> int:
        return len(self.models)

    def model(self, model_id: int) -> VehicleModel:
        try:
            return self._models_by_id[model_id]
        except KeyError:
            raise InstanceError(f"unknown model id {model_id}") from None


@dataclass(frozen=True)
class IncompatibilityGraph:
    """Conflict graph over tour indices: an edge means the tours cannot share a vehicle."""

    n: int
    edges: frozenset[tuple[int, int]]
    adjacency: tuple[frozenset[int], ...]

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "IncompatibilityGraph":
        normalized = set()
        neighbors: list[set[int]] = [set() for _ in range(n)]
        for i, j in edges:
            if i == j:
                raise InstanceError(f"self-loop on node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise InstanceError(f"edge ({i}, {j}) out of range for {n} nodes")
            a, b = (i, j) if i < j else (j, i)
            normalized.add((a, b))
            neighbors[a].add(b)
            neighbors[b].add(a)
        return cls(n, frozenset(normalized), tuple(frozenset(s) for s in neighbors))

    def has_edge(self, i: int, j: int) -> bool:
        a, b = (i, j) if i < j else (j, i)
        return (a, b) in self.edges

    def neighbors(self, i: int) -> frozenset[int]:
        return self.adjacency[i]

    def is_independent(self, nodes: Iterable[int]) -> bool:
        members = sorted(set(nodes))
        for idx, i in enumerate(members):
            adj = self.adjacency[i]
            for j in members[idx + 1 :]:
                if j in adj:
                    return False
        return True


def _travel(instance: FleetInstance, from_loc: int | None, to_loc: int | None) -> float:
    if instance.travel_time is None or from_loc is None or to_loc is None:
        return 0.0
    size = len(instance.travel_time)
    if not (0 <= from_loc < size and 0 <= to_loc < size):
        raise InstanceError(
            f"location index out of range for travel_time: ({from_loc}, {to_loc})"
        )
    return instance.travel_time[from_loc][to_loc]


def build_incompatibility_graph(instance: FleetInstance) -> IncompatibilityGraph:
    """Build the tour conflict graph.

    Tours i and j are compatible when one can run after the other on the
    same vehicle: the first tour's arrival plus the relocation time must
    not exceed the second tour's departure.  An edge is added when neither
    ordering works.
    """
    tours = instance.tours
    n = len(tours)
    edges = set()
    for i in range(n):
        a = tours[i]
        for j in range(i + 1, n):
            b = tours[j]
            i_then_j = a.t_a + _travel(instance, a.l_a, b.l_d) <= b.t_d
            j_then_i = b.t_a + _travel(instance, b.l_a, a.l_d) <= a.t_d
            if not (i_then_j or j_then_i):
                edges.add((i, j))
    return IncompatibilityGraph.from_edges(n, edges)


def generate_instance(
    n_tours: int,
    n_models: int,
    allowed_per_tour: int,
    seed: int,
    *,
    horizon: float = 1440.0,
    duration_range: tuple[float, float] = (60.0, 180.0),
    op_cost_range: tuple[float, float] = (1.0, 5.0),
    purchase_cost_range: tuple[float, float] = (5.0, 10.0),
) -> FleetInstance:
    """Generate a synthetic instance, deterministic for a fixed seed.

    Departures are uniform over a one-day horizon and durations uniform
    over ``duration_range``; each tour draws ``allowed_per_tour`` distinct
    allowed models.  Operating costs are uniform per (tour, model) and
    purchase costs uniform per model.  No location data is generated;
    conflicts come from window overlap alone.
    """
    if n_tours < 1:
        raise ValueError("n_tours must be at least 1")
    if n_models < 1:
        raise ValueError("n_models must be at least 1")
    if not 1 <= allowed_per_tour <= n_models:
        raise ValueError(
            f"allowed_per_tour must be between 1 and n_models ({n_models}), "
            f"got {allowed_per_tour}"
        )
    rng = np.random.default_rng(seed)
    departures = rng.uniform(0.0, horizon, n_tours)
    durations = rng.uniform(duration_range[0], duration_range[1], n_tours)
    allowed = [
        rng.choice(n_models, size=allowed_per_tour, replace=False) for _ in range(n_tours)
    ]
    purchase = rng.uniform(purchase_cost_range[0], purchase_cost_range[1], n_models)
    op = rng.uniform(op_cost_range[0], op_cost_range[1], (n_models, n_tours))
    tours = [
        Tour(
            id=k,
            t_d=float(departures[k]),
            t_a=float(departures[k] + durations[k]),
            allowed_models=frozenset(int(v) for v in allowed[k]),
        )
        for k in range(n_tours)
    ]
    models = [
        VehicleModel(
            id=v,
            purchase_cost=float(purchase[v]),
            op_cost={k: float(op[v, k]) for k in range(n_tours)},
        )
        for v in range(n_models)
    ]
    return FleetInstance(tours=tours, models=models)


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ParseError(f"{context}: missing '{key}'")
    return obj[key]


def _parse_tour(entry: dict, pos: int) -> Tour:
    ctx = f"tours[{pos}]"
    if not isinstance(entry, dict):
        raise ParseError(f"{ctx}: expected an object")
    raw_allowed = _require(entry, "allowed_models", ctx)
    if not isinstance(raw_allowed, list):
        raise ParseError(f"{ctx}.allowed_models: expected a list")
    try:
        return Tour(
            id=int(_require(entry, "id", ctx)),
            t_d=float(_require(entry, "t_d", ctx)),
            t_a=float(_require(entry, "t_a", ctx)),
            allowed_models=frozenset(int(v) for v in raw_allowed),
            l_d=None if entry.get("l_d") is None else int(entry["l_d"]),
            l_a=None if entry.get("l_a") is None else int(entry["l_a"]),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise ParseError(f"{ctx}: {exc}") from exc


def _parse_model(entry: dict, pos: int) -> VehicleModel:
    ctx = f"models[{pos}]"
    if not isinstance(entry, dict):
        raise ParseError(f"{ctx}: expected an object")
    raw_op = _require(entry, "op_cost", ctx)
    if not isinstance(raw_op, dict):
        raise ParseError(f"{ctx}.op_cost: expected an object mapping tour id to cost")
    try:
        op_cost = {int(k): float(v) for k, v in raw_op.items()}
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{ctx}.op_cost: {exc}") from exc
    try:
        return VehicleModel(
            id=int(_require(entry, "id", ctx)),
            purchase_cost=float(_require(entry, "purchase_cost", ctx)),
            op_cost=op_cost,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise ParseError(f"{ctx}: {exc}") from exc


def read_instance(path) -> FleetInstance:
    """Read an instance from its JSON file; see ``write_instance`` for the schema."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("instance file: top level must be an object")
    raw_tours = _require(data, "tours", "instance file")
    raw_models = _require(data, "models", "instance file")
    if not isinstance(raw_tours, list):
        raise ParseError("tours: expected a list")
    if not isinstance(raw_models, list):
        raise ParseError("models: expected a list")
    tours = [_parse_tour(entry, pos) for pos, entry in enumerate(raw_tours)]
    models = [_parse_model(entry, pos) for pos, entry in enumerate(raw_models)]
    travel_time = None
    if data.get("travel_time") is not None:
        raw_tt = data["travel_time"]
        if not isinstance(raw_tt, list):
            raise ParseError("travel_time: expected a matrix (list of rows)")
        try:
            travel_time = [[float(v) for v in row] for row in raw_tt]
        except (TypeError, ValueError) as exc:
            raise ParseError(f"travel_time: {exc}") from exc
    return FleetInstance(tours=tours, models=models, travel_time=travel_time)


def write_instance(instance: FleetInstance, path) -> None:
    """Write the instance as JSON; ``read_instance`` inverts it exactly."""
    payload: dict = {
        "tours": [
            {
                "id": t.id,
                "t_d": t.t_d,
                "t_a": t.t_a,
                "l_d": t.l_d,
                "l_a": t.l_a,
                "allowed_models": sorted(t.allowed_models),
            }
            for t in instance.tours
        ],
        "models": [
            {
                "id": m.id,
                "purchase_cost": m.purchase_cost,
                "op_cost": {str(k): v for k, v in sorted(m.op_cost.items())},
            }
            for m in instance.models
        ],
    }
    if instance.travel_time is not None:
        payload["travel_time"] = instance.travel_time
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
