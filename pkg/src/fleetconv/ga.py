"""Real-coded genetic algorithm over angle vectors in [0, 2*pi).

Minimizes a black-box objective with elitism, rank-based parent selection
over the top fraction of the population, uniform crossover, and per-gene
mutation that resamples uniformly over the angle range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["GaParams", "Population", "run_ga", "evolve_generation"]

TWO_PI = 2.0 * np.pi


@dataclass
class GaParams:
    max_iterations: int = 50
    population_size: int = 20
    mutation_probability: float = 0.1
    elite_ratio: float = 0.05
    crossover_probability: float = 0.5
    parents_portion: float = 0.3
    crossover_type: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        for name in ("mutation_probability", "elite_ratio", "crossover_probability", "parents_portion"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.crossover_type != "uniform":
            raise ValueError(f"unsupported crossover_type {self.crossover_type!r}")

    @property
    def n_elite(self) -> int:
        if self.elite_ratio <= 0.0:
            return 0
        return max(1, math.ceil(self.elite_ratio * self.population_size))

    @classmethod
    def for_size(cls, n_tours: int, seed: int = 0) -> "GaParams":
        """Default budgets by instance size: (50 iters, pop 20) up to 32
        tours, (100, 40) beyond."""
        if n_tours <= 32:
            return cls(max_iterations=50, population_size=20, seed=seed)
        return cls(max_iterations=100, population_size=40, seed=seed)


@dataclass
class Population:
    """Genes (one row per individual) with their evaluated objective values."""

    genes: np.ndarray
    values: np.ndarray


def _evaluate(objective, genes: np.ndarray, generation: int) -> np.ndarray:
    values = np.empty(genes.shape[0])
    for i, row in enumerate(genes):
        try:
            values[i] = objective(row)
        except Exception as exc:
            raise RuntimeError(
                f"objective failed on individual {i} of generation {generation}"
            ) from exc
    return values


def evolve_generation(
    population: Population,
    params: GaParams,
    objective,
    rng: np.random.Generator | None = None,
    generation: int = 0,
) -> Population:
    """One generation: keep the elites verbatim, then fill with children of
    rank-selected parents from the top ``parents_portion`` fraction."""
    if rng is None:
        rng = np.random.default_rng(params.seed)
    order = np.argsort(population.values, kind="stable")
    genes = population.genes[order]
    values = population.values[order]
    pop = params.population_size
    n_vars = genes.shape[1]

    n_elite = params.n_elite
    pool = max(1, math.ceil(params.parents_portion * pop))
    rank_weights = np.arange(pool, 0, -1, dtype=float)
    probabilities = rank_weights / rank_weights.sum()

    children = np.empty((pop - n_elite, n_vars))
    for row in range(pop - n_elite):
        first = genes[rng.choice(pool, p=probabilities)]
        second = genes[rng.choice(pool, p=probabilities)]
        if rng.random() < params.crossover_probability:
            mask = rng.random(n_vars) < 0.5
            child = np.where(mask, first, second)
        else:
            child = first.copy()
        mutate = rng.random(n_vars) < params.mutation_probability
        if mutate.any():
            child = child.copy()
            child[mutate] = rng.uniform(0.0, TWO_PI, int(mutate.sum()))
        children[row] = child

    child_values = _evaluate(objective, children, generation)
    next_genes = np.vstack([genes[:n_elite], children])
    next_values = np.concatenate([values[:n_elite], child_values])
    return Population(genes=next_genes, values=next_values)


def run_ga(objective, n_vars: int, params: GaParams) -> tuple[np.ndarray, float]:
    """Minimize the objective; returns the best angles and their value.

    Deterministic for a fixed seed; the best-so-far value never increases
    across generations.
    """
    if n_vars < 1:
        raise ValueError("n_vars must be at least 1")
    rng = np.random.default_rng(params.seed)
    genes = rng.uniform(0.0, TWO_PI, (params.population_size, n_vars))
    values = _evaluate(objective, genes, 0)
    population = Population(genes=genes, values=values)

    best_idx = int(np.argmin(values))
    best_theta = genes[best_idx].copy()
    best_value = float(values[best_idx])
    for generation in range(1, params.max_iterations + 1):
        population = evolve_generation(population, params, objective, rng, generation)
        idx = int(np.argmin(population.values))
        if population.values[idx] < best_value:
            best_value = float(population.values[idx])
            best_theta = population.genes[idx].copy()
    return best_theta, best_value
