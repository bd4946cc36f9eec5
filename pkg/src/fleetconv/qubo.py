"""Penalized binary objective for a weighted subgraph and its spin-matrix form.

The binary objective rewards selected node weights and charges a penalty P
per selected conflicting pair.  For the simulator the objective is recast
over spin variables: each original variable gets a paired auxiliary spin
pinned at +1, so linear terms become off-diagonal quadratic couplings and
the whole objective is a symmetric matrix of twice the size plus a scalar
constant, zero-padded up to a power-of-two dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mwis import WeightedSubgraph

__all__ = [
    "QuboProblem",
    "SpinQubo",
    "build_qubo",
    "qubo_value",
    "to_squbo",
    "squbo_value",
    "binary_to_spins",
    "pad_dimension",
    "qubit_count",
    "default_penalty",
    "size_penalty",
]


@dataclass
class QuboProblem:
    """Unconstrained binary maximization: sum of selected weights minus
    penalty times the number of selected conflicting pairs."""

    n: int
    linear: np.ndarray
    edges: frozenset[tuple[int, int]]
    penalty: float


def build_qubo(sub: WeightedSubgraph, penalty: float) -> QuboProblem:
    if penalty <= 0:
        raise ValueError(f"penalty must be positive, got {penalty}")
    if sub.n < 1:
        raise ValueError("subgraph must have at least one node")
    return QuboProblem(
        n=sub.n,
        linear=np.asarray(sub.weights, dtype=float).copy(),
        edges=frozenset(sub.edges),
        penalty=float(penalty),
    )


def qubo_value(problem: QuboProblem, y) -> float:
    """Objective of a binary assignment."""
    y = np.asarray(y)
    if y.shape != (problem.n,):
        raise ValueError(f"assignment must have {problem.n} entries")
    gain = float(y @ problem.linear)
    violations = sum(int(y[i]) * int(y[j]) for i, j in problem.edges)
    return gain - problem.penalty * violations


def default_penalty(weights) -> float:
    """Penalty large enough that every maximizer is an independent set."""
    weights = np.asarray(weights, dtype=float)
    top = float(weights.max()) if weights.size else 0.0
    return 1.0 + 2.0 * max(0.0, top)


def size_penalty(n_tours: int) -> float:
    """Instance-size penalty rule: 10 up to 32 tours, scaling linearly after."""
    return 10.0 * max(1.0, n_tours / 32.0)


def pad_dimension(dim: int) -> int:
    """Smallest power of two at least ``dim``."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    return 1 << (dim - 1).bit_length()


def qubit_count(n: int) -> int:
    """Qubits needed for the doubled spin form of an n-variable problem."""
    return pad_dimension(2 * n).bit_length() - 1


@dataclass
class SpinQubo:
    """Symmetric spin coupling matrix plus scalar constant.

    Spins are +1/-1.  The first ``n`` coordinates carry the variables,
    coordinates n..2n-1 are the pinned auxiliaries, and anything beyond 2n
    is zero padding up to the power-of-two ``dim``.
    """

    matrix: np.ndarray
    constant: float
    n: int
    dim: int


def to_squbo(problem: QuboProblem) -> SpinQubo:
    """Doubled spin form of the binary objective.

    With y = (1 - z) / 2 each weight term becomes a coupling between a
    variable spin and its pinned auxiliary, each penalized pair adds the
    two auxiliary couplings minus the direct pair coupling, and the
    leftover scalar is half the weight sum minus a quarter penalty per
    edge.  Every product coefficient is split evenly across the symmetric
    matrix entries.
    """
    n = problem.n
    dim = pad_dimension(2 * n)
    matrix = np.zeros((dim, dim))

    def couple(a: int, b: int, coefficient: float) -> None:
        matrix[a, b] += coefficient / 2.0
        matrix[b, a] += coefficient / 2.0

    for k in range(n):
        couple(k, k + n, -problem.linear[k] / 2.0)
    quarter = problem.penalty / 4.0
    for i, j in sorted(problem.edges):
        couple(i, i + n, quarter)
        couple(j, j + n, quarter)
        couple(i, j, -quarter)
    constant = float(problem.linear.sum()) / 2.0 - quarter * len(problem.edges)
    return SpinQubo(matrix=matrix, constant=constant, n=n, dim=dim)


def binary_to_spins(y, dim: int) -> np.ndarray:
    """Spin vector for a binary assignment: z = 1 - 2y on the variable
    coordinates, +1 on auxiliary and padded coordinates."""
    y = np.asarray(y)
    z = np.ones(dim)
    z[: y.size] = 1.0 - 2.0 * y
    return z


def squbo_value(squbo: SpinQubo, z) -> float:
    z = np.asarray(z, dtype=float)
    if z.shape != (squbo.dim,):
        raise ValueError(f"spin vector must have {squbo.dim} entries")
    return float(z @ squbo.matrix @ z) + squbo.constant
