"""Restricted master LP for the covering formulation, and exact rounding.

The master minimizes total allocation cost plus a large rejection price R
per uncovered tour, subject to covering every tour at least once.  It is
solved by a revised primal simplex: the all-rejected basis is feasible, so
no phase one is needed, and the duals fall out of the final basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .instance import FleetInstance, IncompatibilityGraph

__all__ = [
    "Column",
    "ColumnError",
    "SolverError",
    "ColumnPool",
    "RcpSolution",
    "RoundedSolution",
    "column_cost",
    "make_column",
    "compute_big_R",
    "solve_rcp",
    "round_solution",
]

FEAS_TOL = 1e-9
DUALITY_TOL = 1e-6


class ColumnError(ValueError):
    """A column violates its invariants."""


class SolverError(RuntimeError):
    """The LP solve failed numerically or exceeded its pivot budget."""


@dataclass(frozen=True)
class Column:
    """A feasible allocation: a set of mutually compatible tours on one model.

    ``cost`` is the model purchase cost plus the operating cost of every
    member tour.
    """

    members: frozenset[int]
    model: int
    cost: float


def column_cost(instance: FleetInstance, members, model_id: int) -> float:
    model = instance.model(model_id)
    return model.purchase_cost + math.fsum(model.op_cost[k] for k in sorted(members))


def make_column(instance: FleetInstance, members, model_id: int) -> Column:
    """Build a column with its cost computed from the instance."""
    members = frozenset(members)
    return Column(members=members, model=model_id, cost=column_cost(instance, members, model_id))


class ColumnPool:
    """Deduplicated column pool; key is (members, model)."""

    def __init__(self, instance: FleetInstance, graph: IncompatibilityGraph):
        self.instance = instance
        self.graph = graph
        self.columns: list[Column] = []
        self._keys: set[tuple[frozenset[int], int]] = set()

    def __len__(self) -> int:
        return len(self.columns)

    def validate(self, column: Column) -> None:
        for k in column.members:
            if not 0 <= k < self.instance.n_tours:
                raise ColumnError(f"column references unknown tour {k}")
            if column.model not in self.instance.tours[k].allowed_models:
                raise ColumnError(f"tour {k} does not allow model {column.model}")
        if not self.graph.is_independent(column.members):
            raise ColumnError("column members are not pairwise compatible")
        expected = column_cost(self.instance, column.members, column.model)
        if abs(column.cost - expected) > 1e-9:
            raise ColumnError(
                f"column cost {column.cost} does not match recomputed cost {expected}"
            )

    def add_column(self, column: Column) -> bool:
        """Append the column unless an identical (members, model) is pooled."""
        self.validate(column)
        key = (column.members, column.model)
        if key in self._keys:
            return False
        self._keys.add(key)
        self.columns.append(column)
        return True


@dataclass
class RcpSolution:
    """Optimal primal/dual pair of the restricted master LP."""

    x: dict[int, float]
    r: dict[int, float]
    objective: float
    duals: dict[int, float]


def compute_big_R(instance: FleetInstance) -> float:
    """Rejection price strictly above any allocation cost plus one."""
    max_purchase = max(m.purchase_cost for m in instance.models)
    worst_ops = math.fsum(
        max(m.op_cost[t.id] for m in instance.models) for t in instance.tours
    )
    return max_purchase + worst_ops + 2.0


def solve_rcp(
    columns: list[Column],
    n_tours: int,
    R: float,
    *,
    max_pivots: int = 10_000,
) -> RcpSolution:
    """Solve the restricted master LP over the given columns.

    Revised primal simplex with Dantzig pricing, falling back to Bland's
    rule after a stretch of degenerate pivots.  Starts from the feasible
    all-rejected basis.  Returns the optimal primal values, objective, and
    dual prices per tour.
    """
    m = n_tours
    nx = len(columns)
    for col in columns:
        if col.cost >= R:
            raise ValueError(f"column cost {col.cost} reaches the rejection price {R}")
    # variables: x columns, r rejections, s surpluses (cover >= 1)
    n_total = nx + 2 * m
    c = np.zeros(n_total)
    A = np.zeros((m, n_total))
    for j, col in enumerate(columns):
        c[j] = col.cost
        for k in col.members:
            A[k, j] = 1.0
    c[nx : nx + m] = R
    A[:, nx : nx + m] = np.eye(m)
    A[:, nx + m :] = -np.eye(m)
    b = np.ones(m)

    basis = list(range(nx, nx + m))
    bland = False
    stalled = 0
    for _ in range(max_pivots):
        B = A[:, basis]
        try:
            y = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError as exc:
            raise SolverError("singular basis in simplex") from exc
        reduced = c - y @ A
        in_basis = np.zeros(n_total, dtype=bool)
        in_basis[basis] = True
        candidates = np.flatnonzero(~in_basis & (reduced < -FEAS_TOL))
        if candidates.size == 0:
            break
        if bland:
            entering = int(candidates[0])
        else:
            entering = int(candidates[np.argmin(reduced[candidates])])
        direction = np.linalg.solve(B, A[:, entering])
        basics = np.linalg.solve(B, b)
        step = np.inf
        leaving_row = -1
        for row in range(m):
            if direction[row] > FEAS_TOL:
                ratio = basics[row] / direction[row]
                if ratio < step - FEAS_TOL or (
                    ratio < step + FEAS_TOL
                    and (leaving_row == -1 or basis[row] < basis[leaving_row])
                ):
                    step = ratio
                    leaving_row = row
        if leaving_row == -1:
            raise SolverError("unbounded direction in master LP")
        if step < FEAS_TOL:
            stalled += 1
            if stalled > 40:
                bland = True
        else:
            stalled = 0
        basis[leaving_row] = entering
    else:
        raise SolverError(f"simplex exceeded {max_pivots} pivots")

    B = A[:, basis]
    values = np.zeros(n_total)
    values[basis] = np.linalg.solve(B, b)
    y = np.linalg.solve(B.T, c[basis])
    if np.any(values < -1e-7):
        raise SolverError("negative basic value at optimum")
    if np.any(y < -1e-7):
        raise SolverError("negative dual at optimum")
    objective = float(c @ values)
    duals = {k: float(max(y[k], 0.0)) for k in range(m)}
    if abs(objective - math.fsum(duals.values())) > DUALITY_TOL * max(1.0, abs(objective)):
        raise SolverError("duality gap exceeds tolerance")

    def clamp(v: float) -> float:
        return min(1.0, max(0.0, float(v)))

    x = {j: clamp(values[j]) for j in range(nx)}
    r = {k: clamp(values[nx + k]) for k in range(m)}
    return RcpSolution(x=x, r=r, objective=objective, duals=duals)


@dataclass
class RoundedSolution:
    """Integer assignment over the pooled columns."""

    columns: list[Column]
    rejected: set[int]
    objective: float


def round_solution(
    columns: list[Column], instance: FleetInstance, R: float
) -> RoundedSolution:
    """Optimal binary cover restricted to the pooled columns.

    Depth-first branch-and-bound on the least-covered tour; branches try
    each covering column and rejection.  Pools at this scale stay small,
    so the exact search is cheap.
    """
    n = instance.n_tours
    full = (1 << n) - 1
    cover = []
    for col in columns:
        mask = 0
        for k in col.members:
            mask |= 1 << k
        cover.append(mask)
    by_tour: list[list[int]] = [[] for _ in range(n)]
    for j, mask in enumerate(cover):
        for k in range(n):
            if mask >> k & 1:
                by_tour[k].append(j)
    for k in range(n):
        by_tour[k].sort(key=lambda j: columns[j].cost)
    unit_lb = [
        min([R] + [columns[j].cost / len(columns[j].members) for j in by_tour[k]])
        for k in range(n)
    ]

    # greedy cover for the initial upper bound
    chosen_init: list[int] = []
    uncovered = full
    cost_init = 0.0
    while uncovered:
        best_j = -1
        best_ratio = R  # rejecting one tour costs R per tour covered
        for j, mask in enumerate(cover):
            new = (mask & uncovered).bit_count()
            if new and columns[j].cost / new < best_ratio:
                best_ratio = columns[j].cost / new
                best_j = j
        if best_j == -1:
            break
        chosen_init.append(best_j)
        cost_init += columns[best_j].cost
        uncovered &= ~cover[best_j]
    rejected_init = {k for k in range(n) if uncovered >> k & 1}
    best = {
        "cost": cost_init + R * len(rejected_init),
        "chosen": list(chosen_init),
        "rejected": set(rejected_init),
    }

    def lower_bound(unc: int) -> float:
        total = 0.0
        scan = unc
        while scan:
            lsb = scan & -scan
            total += unit_lb[lsb.bit_length() - 1]
            scan ^= lsb
        return total

    def search(unc: int, cost: float, chosen: list[int], rejected: set[int]) -> None:
        if cost + lower_bound(unc) >= best["cost"] - 1e-12:
            return
        if unc == 0:
            best["cost"] = cost
            best["chosen"] = list(chosen)
            best["rejected"] = set(rejected)
            return
        # branch on the uncovered tour with the fewest covering columns
        pivot = -1
        fewest = None
        scan = unc
        while scan:
            lsb = scan & -scan
            k = lsb.bit_length() - 1
            scan ^= lsb
            if fewest is None or len(by_tour[k]) < fewest:
                fewest = len(by_tour[k])
                pivot = k
        for j in by_tour[pivot]:
            chosen.append(j)
            search(unc & ~cover[j], cost + columns[j].cost, chosen, rejected)
            chosen.pop()
        rejected.add(pivot)
        search(unc & ~(1 << pivot), cost + R, chosen, rejected)
        rejected.discard(pivot)

    search(full, 0.0, [], set())
    chosen_cols = [columns[j] for j in best["chosen"]]
    objective = math.fsum(col.cost for col in chosen_cols) + R * len(best["rejected"])
    return RoundedSolution(columns=chosen_cols, rejected=best["rejected"], objective=objective)
