"""Exact maximum-weight independent set solvers for the pricing subproblems.

``solve_mwis_exact`` is a bitset branch-and-bound; ``brute_force_mwis`` is
the exhaustive oracle used for cross-checking.  Both admit the empty set,
so the optimum is never negative, and neither ever returns a node whose
weight is zero or negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .instance import FleetInstance, IncompatibilityGraph

__all__ = [
    "WeightedSubgraph",
    "restrict_to_model",
    "solve_mwis_exact",
    "brute_force_mwis",
    "EXACT_SOLVER_CAP",
    "BRUTE_FORCE_CAP",
]

EXACT_SOLVER_CAP = 512
BRUTE_FORCE_CAP = 20


@dataclass
class WeightedSubgraph:
    """Node-weighted conflict graph over the tours admitted for one model.

    ``edges`` use local indices into ``node_ids``; weights are aligned
    with ``node_ids``.
    """

    node_ids: list[int]
    weights: np.ndarray
    edges: frozenset[tuple[int, int]]

    @property
    def n(self) -> int:
        return len(self.node_ids)


def restrict_to_model(
    graph: IncompatibilityGraph,
    instance: FleetInstance,
    duals: dict[int, float],
    model_id: int,
) -> WeightedSubgraph:
    """Induced subgraph over tours that allow ``model_id``.

    Node weights are the dual price minus the model's operating cost, the
    gain of adding the tour to a new allocation for this model.
    """
    model = instance.model(model_id)
    node_ids = [t.id for t in instance.tours if model_id in t.allowed_models]
    missing = [k for k in node_ids if k not in duals]
    if missing:
        raise ValueError(f"duals missing for tours {missing}")
    weights = np.array([duals[k] - model.op_cost[k] for k in node_ids], dtype=float)
    local = {k: i for i, k in enumerate(node_ids)}
    edges = frozenset(
        (local[a], local[b]) for a, b in graph.edges if a in local and b in local
    )
    return WeightedSubgraph(node_ids=node_ids, weights=weights, edges=edges)


def _adjacency_masks(n: int, edges) -> list[int]:
    masks = [0] * n
    for i, j in edges:
        masks[i] |= 1 << j
        masks[j] |= 1 << i
    return masks


def _value_of(sub: WeightedSubgraph, members: set[int]) -> float:
    # fsum gives one exactly-rounded value regardless of solver path
    return math.fsum(sub.weights[i] for i in sorted(members))


def solve_mwis_exact(
    sub: WeightedSubgraph, cap: int = EXACT_SOLVER_CAP
) -> tuple[set[int], float]:
    """Exact MWIS by branch-and-bound, returning (member node ids, optimum).

    Nodes with non-positive weight are dropped up front; they can never
    strictly improve the optimum.  Branching picks the highest-degree
    vertex of the remaining candidate subgraph and the bound is the sum
    of remaining (positive) candidate weights.
    """
    if sub.n > cap:
        raise ValueError(f"subgraph has {sub.n} nodes, exceeding the solver cap {cap}")
    keep = [i for i in range(sub.n) if sub.weights[i] > 0]
    if not keep:
        return set(), 0.0
    m = len(keep)
    w = [float(sub.weights[i]) for i in keep]
    pos = {orig: new for new, orig in enumerate(keep)}
    adj = _adjacency_masks(
        m, ((pos[a], pos[b]) for a, b in sub.edges if a in pos and b in pos)
    )

    # greedy seed by descending weight for an initial lower bound
    best_set = 0
    best_val = 0.0
    blocked = 0
    for i in sorted(range(m), key=lambda i: (-w[i], i)):
        if not blocked & (1 << i):
            best_set |= 1 << i
            best_val += w[i]
            blocked |= adj[i] | (1 << i)

    stack = [((1 << m) - 1, 0.0, 0)]
    while stack:
        mask, cur, chosen = stack.pop()
        if mask == 0:
            if cur > best_val:
                best_val = cur
                best_set = chosen
            continue
        remaining = 0.0
        branch_vertex = -1
        branch_degree = -1
        scan = mask
        while scan:
            lsb = scan & -scan
            i = lsb.bit_length() - 1
            scan ^= lsb
            remaining += w[i]
            degree = (adj[i] & mask).bit_count()
            if degree > branch_degree:
                branch_degree = degree
                branch_vertex = i
        if cur + remaining <= best_val:
            continue
        if branch_degree == 0:
            # candidates are pairwise compatible and all positive: take them all
            if cur + remaining > best_val:
                best_val = cur + remaining
                best_set = chosen | mask
            continue
        v_bit = 1 << branch_vertex
        stack.append((mask & ~v_bit, cur, chosen))
        stack.append(
            (mask & ~(adj[branch_vertex] | v_bit), cur + w[branch_vertex], chosen | v_bit)
        )

    members_local = {keep[i] for i in range(m) if best_set & (1 << i)}
    members = {sub.node_ids[i] for i in members_local}
    return members, _value_of(sub, members_local)


def brute_force_mwis(
    sub: WeightedSubgraph, cap: int = BRUTE_FORCE_CAP
) -> tuple[set[int], float]:
    """Exhaustive MWIS over all 2^n subsets; the testing oracle."""
    if sub.n > cap:
        raise ValueError(f"subgraph has {sub.n} nodes, exceeding the brute-force cap {cap}")
    n = sub.n
    if n == 0:
        return set(), 0.0
    masks = np.arange(1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(np.int8)
    feasible = np.ones(1 << n, dtype=bool)
    for i, j in sub.edges:
        feasible &= ~((bits[:, i] == 1) & (bits[:, j] == 1))
    values = bits @ np.asarray(sub.weights, dtype=float)
    values[~feasible] = -np.inf
    # argmax takes the first maximizer; subsets precede supersets in mask
    # order, so non-contributing nodes never enter the returned set
    best = int(np.argmax(values))
    members_local = {i for i in range(n) if best >> i & 1}
    members = {sub.node_ids[i] for i in members_local}
    return members, _value_of(sub, members_local)
