"""Fleet-conversion column generation with exact and simulated variational pricing."""

from .engine import (
    ColgenResult,
    ConvergenceTrace,
    IterationLimitError,
    IterationRecord,
    SolverConfig,
    classical_worker_solve,
    compute_metrics,
    greedy_initial_columns,
    quantum_worker_solve,
    run_column_generation,
)
from .ga import GaParams, run_ga
from .instance import (
    FleetInstance,
    IncompatibilityGraph,
    InstanceError,
    ParseError,
    Tour,
    VehicleModel,
    build_incompatibility_graph,
    generate_instance,
    read_instance,
    write_instance,
)
from .logq import (
    PauliTermList,
    build_state,
    decode_theta,
    expectation_exact,
    expectation_sampled,
    objective_sigma,
    pauli_decompose,
    threshold,
    theta_to_spins,
)
from .master import (
    Column,
    ColumnError,
    ColumnPool,
    RcpSolution,
    RoundedSolution,
    SolverError,
    compute_big_R,
    make_column,
    round_solution,
    solve_rcp,
)
from .mwis import WeightedSubgraph, brute_force_mwis, restrict_to_model, solve_mwis_exact
from .qubo import (
    QuboProblem,
    SpinQubo,
    build_qubo,
    default_penalty,
    pad_dimension,
    qubit_count,
    qubo_value,
    size_penalty,
    squbo_value,
    to_squbo,
)

__version__ = "0.1.0"
