"""Command-line interface: generate instances, solve them, report results.

``generate`` writes an instance JSON, ``solve`` runs column generation and
writes a report JSON plus a trace CSV, and ``report`` aggregates report
files into a summary, a normalized-cost CSV, and a convergence figure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .engine import (
    IterationLimitError,
    SolverConfig,
    run_column_generation,
)
from .ga import GaParams
from .instance import (
    InstanceError,
    build_incompatibility_graph,
    generate_instance,
    read_instance,
    write_instance,
)
from .qubo import size_penalty
from .reporting import (
    aggregate_reports,
    build_report,
    read_report,
    render_convergence_figure,
    write_report,
    write_series_csv,
    write_trace_csv,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fleetconv",
        description="Fleet-conversion column generation with exact and simulated variational pricing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a synthetic instance file")
    gen.add_argument("--tours", type=int, required=True, help="number of tours")
    gen.add_argument("--models", type=int, required=True, help="number of vehicle models")
    gen.add_argument("--allowed", type=int, required=True, help="allowed models per tour")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--output", required=True, help="instance JSON path")

    solve = sub.add_parser("solve", help="run column generation on an instance file")
    solve.add_argument("instance", help="instance JSON path")
    solve.add_argument(
        "--mode", choices=["classical", "quantum", "hybrid"], default="hybrid"
    )
    solve.add_argument(
        "--penalty", type=float, default=None,
        help="conflict penalty (default: 10 up to 32 tours, scaled with size)",
    )
    solve.add_argument(
        "--expectation", choices=["exact", "sampled"], default="exact"
    )
    solve.add_argument("--shots", type=int, default=300, help="shots per term in sampled mode")
    solve.add_argument("--ga-pop", type=int, default=None, help="GA population size")
    solve.add_argument("--ga-iters", type=int, default=None, help="GA generations")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--max-iterations", type=int, default=None)
    solve.add_argument("-o", "--output", required=True, help="report JSON path")
    solve.add_argument(
        "--trace", default=None,
        help="trace CSV path (default: report path with _trace.csv suffix)",
    )

    rep = sub.add_parser("report", help="aggregate run reports into a summary")
    rep.add_argument("reports", nargs="+", help="report JSON files")
    rep.add_argument("-o", "--outdir", required=True, help="output directory")
    return parser


def _cmd_generate(args, parser: argparse.ArgumentParser) -> int:
    if not 1 <= args.allowed <= args.models:
        parser.error(
            f"--allowed must be between 1 and --models ({args.models}), got {args.allowed}"
        )
    instance = generate_instance(args.tours, args.models, args.allowed, args.seed)
    write_instance(instance, args.output)
    graph = build_incompatibility_graph(instance)
    print(
        f"wrote {args.output}: {instance.n_tours} tours, {instance.n_models} models, "
        f"{len(graph.edges)} conflict edges"
    )
    return 0


def _resolve_config(args, n_tours: int) -> SolverConfig:
    ga_defaults = GaParams.for_size(n_tours, args.seed)
    ga = GaParams(
        max_iterations=args.ga_iters if args.ga_iters is not None else ga_defaults.max_iterations,
        population_size=args.ga_pop if args.ga_pop is not None else ga_defaults.population_size,
        seed=args.seed,
    )
    penalty = args.penalty if args.penalty is not None else size_penalty(n_tours)
    return SolverConfig(
        mode=args.mode,
        penalty=penalty,
        ga=ga,
        expectation=args.expectation,
        shots=args.shots,
        seed=args.seed,
        max_iterations=args.max_iterations,
    )


def _cmd_solve(args, parser: argparse.ArgumentParser) -> int:
    try:
        instance = read_instance(args.instance)
    except (OSError, InstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    config = _resolve_config(args, instance.n_tours)
    trace_path = (
        args.trace
        if args.trace is not None
        else str(Path(args.output).with_suffix("")) + "_trace.csv"
    )
    graph = build_incompatibility_graph(instance)
    started = time.perf_counter()
    try:
        result = run_column_generation(instance, config)
    except IterationLimitError as exc:
        partial = {
            "trace": [
                {
                    "iteration": rec.iteration,
                    "rcp_objective": rec.rcp_objective,
                    "normalized_cost": float("nan"),
                    "worker_kind": rec.worker_kind,
                    "columns_added": rec.columns_added,
                    "sigma_best": rec.sigma_best,
                    "elapsed_ms": rec.elapsed_ms,
                }
                for rec in exc.trace.iterations
            ]
        }
        write_trace_csv(partial, trace_path)
        print(f"error: {exc}; partial trace written to {trace_path}", file=sys.stderr)
        return 1
    wall = time.perf_counter() - started
    report = build_report(
        instance,
        config,
        result,
        wall,
        instance_path=str(args.instance),
        n_edges=len(graph.edges),
    )
    write_report(report, args.output)
    write_trace_csv(report, trace_path)
    res = report["results"]
    print(
        f"lp objective {res['lp_objective']:.6f}, rounded {res['rounded_objective']:.6f}, "
        f"rejected {res['n_rejected']}, quantum share {res['quantum_success_pct']:.2f}%, "
        f"{res['iterations']} iterations in {wall:.2f}s"
    )
    print(f"report: {args.output}")
    print(f"trace:  {trace_path}")
    return 0


def _cmd_report(args, parser: argparse.ArgumentParser) -> int:
    reports = []
    names = []
    for path in args.reports:
        try:
            reports.append(read_report(path))
        except (OSError, ValueError) as exc:
            print(f"error: cannot read report {path}: {exc}", file=sys.stderr)
            return 1
        names.append(Path(path).stem)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = aggregate_reports(reports)
    summary_path = outdir / "summary.json"
    write_report(summary, summary_path)
    series_path = outdir / "normalized_costs.csv"
    write_series_csv(reports, names, series_path)
    figure_path = outdir / "convergence.png"
    render_convergence_figure(reports, names, figure_path)
    print(f"{'size':>6} {'qubits':>7} {'runs':>6} {'mean quantum %':>15}")
    for row in summary["rows"]:
        print(
            f"{row['instance_size']:>6} {row['qubits']:>7} {row['instance_count']:>6} "
            f"{row['mean_quantum_pct']:>15.2f}"
        )
    print(f"summary: {summary_path}")
    print(f"series:  {series_path}")
    print(f"figure:  {figure_path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "generate":
        return _cmd_generate(args, parser)
    if args.command == "solve":
        return _cmd_solve(args, parser)
    if args.command == "report":
        return _cmd_report(args, parser)
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
