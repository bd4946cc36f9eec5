"""Run reports, trace files, aggregation, and convergence figures.

A run report is a JSON document that embeds the per-iteration trace, so
aggregation and plotting need nothing but report files.  The trace CSV
carries exactly the data behind a convergence plot.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .engine import (
    WORKER_CLASSICAL,
    WORKER_NONE,
    WORKER_QUANTUM,
    ColgenResult,
    ConvergenceTrace,
    SolverConfig,
    compute_metrics,
)
from .instance import FleetInstance
from .qubo import qubit_count

__all__ = [
    "TRACE_COLUMNS",
    "build_report",
    "write_report",
    "read_report",
    "write_trace_csv",
    "normalized_series",
    "aggregate_reports",
    "write_series_csv",
    "render_convergence_figure",
]

TRACE_COLUMNS = [
    "iteration",
    "rcp_objective",
    "normalized_cost",
    "worker_kind",
    "columns_added",
    "sigma_best",
    "elapsed_ms",
]


def _trace_rows(trace: ConvergenceTrace, normalized: list[float]) -> list[dict]:
    rows = []
    for rec, norm in zip(trace.iterations, normalized):
        rows.append(
            {
                "iteration": rec.iteration,
                "rcp_objective": rec.rcp_objective,
                "normalized_cost": norm,
                "worker_kind": rec.worker_kind,
                "columns_added": rec.columns_added,
                "sigma_best": rec.sigma_best,
                "elapsed_ms": rec.elapsed_ms,
            }
        )
    return rows


def build_report(
    instance: FleetInstance,
    config: SolverConfig,
    result: ColgenResult,
    wall_time_s: float,
    *,
    instance_path: str | None = None,
    n_edges: int | None = None,
) -> dict:
    """Assemble the JSON-ready report for one run."""
    metrics = compute_metrics(result.trace)
    lp_objective = result.solution.objective
    rounded_objective = result.rounded.objective
    if rounded_objective < lp_objective - 1e-9:
        raise ValueError(
            f"rounded objective {rounded_objective} below LP objective {lp_objective}"
        )
    ga = config.ga
    return {
        "instance": {
            "path": instance_path,
            "n_tours": instance.n_tours,
            "n_models": instance.n_models,
            "n_edges": n_edges if n_edges is not None else len(result.pool.graph.edges),
        },
        "config": {
            "mode": config.mode,
            "penalty": config.penalty,
            "expectation": config.expectation,
            "shots": config.shots,
            "epsilon": config.epsilon,
            "seed": config.seed,
            "max_iterations": config.max_iterations,
            "ga": None
            if ga is None
            else {
                "max_iterations": ga.max_iterations,
                "population_size": ga.population_size,
                "mutation_probability": ga.mutation_probability,
                "elite_ratio": ga.elite_ratio,
                "crossover_probability": ga.crossover_probability,
                "parents_portion": ga.parents_portion,
                "crossover_type": ga.crossover_type,
            },
        },
        "results": {
            "lp_objective": lp_objective,
            "rounded_objective": rounded_objective,
            "n_rejected": len(result.rounded.rejected),
            "n_columns": len(result.pool),
            "quantum_success_pct": metrics["quantum_success_pct"],
            "iterations": len(result.trace),
            "wall_time_s": wall_time_s,
        },
        "trace": _trace_rows(result.trace, metrics["normalized_costs"]),
    }


def write_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2) + "\n")


def read_report(path) -> dict:
    return json.loads(Path(path).read_text())


def write_trace_csv(report: dict, path) -> None:
    """Per-iteration trace as CSV, one row per master solve."""
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=TRACE_COLUMNS)
        writer.writeheader()
        for row in report["trace"]:
            writer.writerow({key: row[key] for key in TRACE_COLUMNS})


def normalized_series(report: dict) -> list[tuple[int, float]]:
    return [(row["iteration"], row["normalized_cost"]) for row in report["trace"]]


def aggregate_reports(reports: list[dict]) -> dict:
    """Summary rows grouped by instance size.

    Mixed sizes are kept as separate rows and flagged on stderr rather
    than merged.
    """
    if not reports:
        raise ValueError("no reports to aggregate")
    by_size: dict[int, list[dict]] = {}
    for report in reports:
        by_size.setdefault(report["instance"]["n_tours"], []).append(report)
    if len(by_size) > 1:
        print(
            f"warning: aggregating {len(by_size)} distinct instance sizes "
            f"{sorted(by_size)}; reporting one row per size",
            file=sys.stderr,
        )
    rows = []
    for size in sorted(by_size):
        group = by_size[size]
        pcts = [r["results"]["quantum_success_pct"] for r in group]
        rows.append(
            {
                "instance_size": size,
                "qubits": qubit_count(size),
                "instance_count": len(group),
                "mean_quantum_pct": math.fsum(pcts) / len(pcts),
            }
        )
    return {"rows": rows}


def write_series_csv(reports: list[dict], names: list[str], path) -> None:
    """Normalized-cost series of every run in one delimited file."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["run", "iteration", "normalized_cost", "worker_kind"])
        for report, name in zip(reports, names):
            for row in report["trace"]:
                writer.writerow(
                    [name, row["iteration"], row["normalized_cost"], row["worker_kind"]]
                )


_KIND_MARKERS = {
    WORKER_QUANTUM: dict(marker="D", color="tab:blue", label="variational worker"),
    WORKER_CLASSICAL: dict(marker="p", color="tab:red", label="exact worker"),
    WORKER_NONE: dict(marker="h", color="black", label="converged"),
}


def render_convergence_figure(reports: list[dict], names: list[str], path) -> None:
    """Normalized cost against iteration for every run, markers by the
    worker kind that produced each point."""
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    seen_labels = set()
    for report, name in zip(reports, names):
        iterations = [row["iteration"] for row in report["trace"]]
        costs = [row["normalized_cost"] for row in report["trace"]]
        (line,) = ax.plot(iterations, costs, linewidth=1.0, alpha=0.8, label=name)
        for row in report["trace"]:
            if row["iteration"] == 0:
                style = dict(marker="s", color="gray", label="greedy seed")
            else:
                style = _KIND_MARKERS[row["worker_kind"]]
            label = style["label"] if style["label"] not in seen_labels else None
            seen_labels.add(style["label"])
            ax.plot(
                [row["iteration"]],
                [row["normalized_cost"]],
                linestyle="none",
                marker=style["marker"],
                color=style["color"],
                markersize=6,
                label=label,
            )
    ax.set_xlabel("iteration")
    ax.set_ylabel("normalized cost")
    ax.grid(True, linewidth=0.3, alpha=0.5)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
