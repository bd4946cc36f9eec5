import numpy as np
import pytest

from fleetconv.instance import FleetInstance, Tour, VehicleModel
from fleetconv.mwis import WeightedSubgraph


def random_subgraph(rng, n_min=1, n_max=16, edge_p=0.35, dyadic=True):
    """Random weighted subgraph; dyadic weights make float sums exact."""
    n = int(rng.integers(n_min, n_max + 1))
    if dyadic:
        weights = rng.integers(-20, 21, n).astype(float) / 4.0
    else:
        weights = rng.uniform(-5.0, 5.0, n)
    edges = frozenset(
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < edge_p
    )
    return WeightedSubgraph(node_ids=list(range(n)), weights=weights, edges=edges)


def tiny_instance(n_models=1, purchase=10.0, op=1.0):
    """Two conflicting tours, identical costs; LP optimum is two singletons."""
    models = [
        VehicleModel(v, purchase, {0: op, 1: op}) for v in range(n_models)
    ]
    allowed = frozenset(range(n_models))
    return FleetInstance(
        tours=[Tour(0, 0.0, 10.0, allowed), Tour(1, 5.0, 15.0, allowed)],
        models=models,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
