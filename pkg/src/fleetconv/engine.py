"""Column-generation driver.

Seeds the pool with a greedy coloring, then alternates master solves with
per-model pricing: in quantum and hybrid modes the simulated variational
worker prices first, and in hybrid mode the exact worker takes over only
when the variational one yields nothing.  Termination with an exact
worker certifies LP optimality over all allocations.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .ga import GaParams, run_ga
from .instance import FleetInstance, IncompatibilityGraph, build_incompatibility_graph
from .logq import decode_theta, expectation_sampled, objective_sigma, pauli_decompose
from .master import (
    Column,
    ColumnPool,
    RcpSolution,
    RoundedSolution,
    compute_big_R,
    make_column,
    round_solution,
    solve_rcp,
)
from .mwis import EXACT_SOLVER_CAP, restrict_to_model, solve_mwis_exact
from .qubo import build_qubo, default_penalty, size_penalty, to_squbo

__all__ = [
    "WORKER_QUANTUM",
    "WORKER_CLASSICAL",
    "WORKER_NONE",
    "IterationRecord",
    "ConvergenceTrace",
    "SolverConfig",
    "ColgenResult",
    "IterationLimitError",
    "greedy_initial_columns",
    "classical_worker_solve",
    "quantum_worker_solve",
    "run_column_generation",
    "compute_metrics",
]

WORKER_QUANTUM = "quantum"
WORKER_CLASSICAL = "classical"
WORKER_NONE = "none"

MODES = ("classical", "quantum", "hybrid")
EXPECTATION_MODES = ("exact", "sampled")


@dataclass
class IterationRecord:
    iteration: int
    rcp_objective: float
    worker_kind: str
    columns_added: int
    sigma_best: float
    elapsed_ms: float


@dataclass
class ConvergenceTrace:
    iterations: list[IterationRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.iterations)

    def objectives(self) -> list[float]:
        return [rec.rcp_objective for rec in self.iterations]


class IterationLimitError(RuntimeError):
    """The engine hit its iteration cap; carries the partial trace."""

    def __init__(self, message: str, trace: ConvergenceTrace):
        super().__init__(message)
        self.trace = trace


@dataclass
class SolverConfig:
    """Knobs for a column-generation run.

    ``penalty`` and ``ga`` left as None resolve to instance-size defaults
    at run start.  ``epsilon`` is the strict improvement margin a priced
    allocation must clear beyond the model purchase cost.
    """

    mode: str = "hybrid"
    penalty: float | None = None
    ga: GaParams | None = None
    expectation: str = "exact"
    shots: int = 300
    epsilon: float = 1e-7
    seed: int = 0
    max_iterations: int | None = None
    mwis_cap: int = EXACT_SOLVER_CAP

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.expectation not in EXPECTATION_MODES:
            raise ValueError(
                f"expectation must be one of {EXPECTATION_MODES}, got {self.expectation!r}"
            )
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.expectation == "sampled" and self.shots < 1:
            raise ValueError("shots must be at least 1 in sampled mode")
        if self.penalty is not None and self.penalty <= 0:
            raise ValueError("penalty must be positive")


@dataclass
class ColgenResult:
    solution: RcpSolution
    rounded: RoundedSolution
    trace: ConvergenceTrace
    pool: ColumnPool


def greedy_initial_columns(
    instance: FleetInstance, graph: IncompatibilityGraph
) -> list[Column]:
    """Greedy seed cover: walk tours by departure time, join the first
    open allocation that fits, otherwise open one on the cheapest allowed
    model."""
    open_columns: list[dict] = []
    for tour in sorted(instance.tours, key=lambda t: (t.t_d, t.id)):
        placed = False
        for slot in open_columns:
            if slot["model"] not in tour.allowed_models:
                continue
            if any(graph.has_edge(tour.id, other) for other in slot["members"]):
                continue
            slot["members"].add(tour.id)
            placed = True
            break
        if not placed:
            cheapest = min(
                sorted(tour.allowed_models),
                key=lambda v: instance.model(v).purchase_cost
                + instance.model(v).op_cost[tour.id],
            )
            open_columns.append({"model": cheapest, "members": {tour.id}})
    return [make_column(instance, slot["members"], slot["model"]) for slot in open_columns]


def _accepted_column(
    instance: FleetInstance,
    members: set[int],
    model_id: int,
    value: float,
    epsilon: float,
) -> Column | None:
    purchase = instance.model(model_id).purchase_cost
    if members and value > purchase + epsilon:
        return make_column(instance, members, model_id)
    return None


def classical_worker_solve(
    graph: IncompatibilityGraph,
    instance: FleetInstance,
    duals: dict[int, float],
    model_id: int,
    *,
    epsilon: float = 1e-7,
    cap: int = EXACT_SOLVER_CAP,
) -> Column | None:
    """Exact pricing for one model: emit an allocation only when its total
    gain strictly clears the model purchase cost."""
    sub = restrict_to_model(graph, instance, duals, model_id)
    if sub.n == 0:
        return None
    members, value = solve_mwis_exact(sub, cap)
    return _accepted_column(instance, members, model_id, value, epsilon)


def quantum_worker_solve(
    graph: IncompatibilityGraph,
    instance: FleetInstance,
    duals: dict[int, float],
    model_id: int,
    config: SolverConfig,
    *,
    ga_params: GaParams | None = None,
    sample_seed=None,
) -> Column | None:
    """Variational pricing for one model.

    Builds the penalized objective on the model subgraph, optimizes the
    angles by GA, and decodes.  An assignment that violates a conflict
    edge is a soft failure (no column).  Acceptance always uses the true
    decoded gain, recomputed classically, never the sampled estimate.
    """
    sub = restrict_to_model(graph, instance, duals, model_id)
    if sub.n == 0:
        return None
    penalty = config.penalty if config.penalty is not None else default_penalty(sub.weights)
    squbo = to_squbo(build_qubo(sub, penalty))
    ga = ga_params if ga_params is not None else (config.ga or GaParams.for_size(instance.n_tours, config.seed))

    if config.expectation == "sampled":
        terms = pauli_decompose(squbo.matrix, squbo.dim.bit_length() - 1)
        sample_rng = np.random.default_rng(sample_seed if sample_seed is not None else config.seed)

        def objective(theta):
            estimate = expectation_sampled(terms, theta, config.shots, sample_rng)
            return -(squbo.dim * estimate + squbo.constant)

    else:

        def objective(theta):
            return -objective_sigma(squbo, theta, mode="exact")

    best_theta, _ = run_ga(objective, sub.n, ga)
    y = decode_theta(best_theta)
    if any(y[i] and y[j] for i, j in sub.edges):
        return None
    selected = [i for i in range(sub.n) if y[i]]
    value = math.fsum(float(sub.weights[i]) for i in selected)
    members = {sub.node_ids[i] for i in selected}
    return _accepted_column(instance, members, model_id, value, config.epsilon)


def _column_sigma(column: Column, duals: dict[int, float], instance: FleetInstance) -> float:
    purchase = instance.model(column.model).purchase_cost
    gained = math.fsum(duals[k] for k in sorted(column.members))
    return gained - (column.cost - purchase)


def run_column_generation(instance: FleetInstance, config: SolverConfig) -> ColgenResult:
    """Full run: greedy seed, iterate master and pricing workers until no
    model yields an improving allocation, then round over the pool."""
    graph = build_incompatibility_graph(instance)
    big_r = compute_big_R(instance)
    resolved = replace(
        config,
        penalty=config.penalty if config.penalty is not None else size_penalty(instance.n_tours),
        ga=config.ga if config.ga is not None else GaParams.for_size(instance.n_tours, config.seed),
    )
    cap = (
        resolved.max_iterations
        if resolved.max_iterations is not None
        else 10 * instance.n_tours
    )
    pool = ColumnPool(instance, graph)
    for column in greedy_initial_columns(instance, graph):
        pool.add_column(column)

    trace = ConvergenceTrace()
    model_ids = [m.id for m in instance.models]
    started = time.perf_counter()
    iteration = 0
    while True:
        solution = solve_rcp(pool.columns, instance.n_tours, big_r)
        accepted: list[Column] = []
        kind = WORKER_NONE
        if resolved.mode in ("quantum", "hybrid"):
            for model_id in model_ids:
                ga = replace(
                    resolved.ga,
                    seed=int(np.random.SeedSequence([resolved.seed, iteration, model_id, 0]).generate_state(1)[0]),
                )
                sample_seed = np.random.SeedSequence([resolved.seed, iteration, model_id, 1])
                column = quantum_worker_solve(
                    graph, instance, solution.duals, model_id, resolved,
                    ga_params=ga, sample_seed=sample_seed,
                )
                if column is not None and pool.add_column(column):
                    accepted.append(column)
            if accepted:
                kind = WORKER_QUANTUM
        if not accepted and resolved.mode in ("classical", "hybrid"):
            for model_id in model_ids:
                column = classical_worker_solve(
                    graph, instance, solution.duals, model_id,
                    epsilon=resolved.epsilon, cap=resolved.mwis_cap,
                )
                if column is not None and pool.add_column(column):
                    accepted.append(column)
            if accepted:
                kind = WORKER_CLASSICAL
        sigma_best = (
            max(_column_sigma(col, solution.duals, instance) for col in accepted)
            if accepted
            else float("nan")
        )
        trace.iterations.append(
            IterationRecord(
                iteration=iteration,
                rcp_objective=solution.objective,
                worker_kind=kind,
                columns_added=len(accepted),
                sigma_best=sigma_best,
                elapsed_ms=(time.perf_counter() - started) * 1000.0,
            )
        )
        if not accepted:
            break
        iteration += 1
        if iteration > cap:
            raise IterationLimitError(
                f"column generation exceeded {cap} iterations", trace
            )

    rounded = round_solution(pool.columns, instance, big_r)
    return ColgenResult(solution=solution, rounded=rounded, trace=trace, pool=pool)


def compute_metrics(trace: ConvergenceTrace) -> dict:
    """Quantum share of successful pricing rounds plus the normalized cost
    series relative to the final master objective."""
    if len(trace) == 0:
        raise ValueError("trace is empty")
    successes = [rec for rec in trace.iterations if rec.columns_added > 0]
    quantum = sum(1 for rec in successes if rec.worker_kind == WORKER_QUANTUM)
    quantum_pct = 100.0 * quantum / len(successes) if successes else 0.0
    final = trace.iterations[-1].rcp_objective
    normalized = [(rec.rcp_objective - final) / final for rec in trace.iterations]
    return {"quantum_success_pct": quantum_pct, "normalized_costs": normalized}
