"""Batch command-line entry point.

Commands: ``validate``, ``solve``, ``oracle``, ``matrix`` and ``serve``.
Exit codes are a stable contract:

    0  success / oracle match / full coverage
    1  IO or parse failure
    2  validation failure (including a stale matrix file)
    3  solve finished with partial coverage
    4  oracle mismatch
    5  instance too large for exhaustive enumeration

Human-readable summaries go to stdout, machine artifacts to files only.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import EvacError, GraphViolation, InstanceTooLarge, SchemaViolation
from .generator import batch_seeds, random_scenario_dict
from .recommender import (
    PlanStatus,
    SolverConfig,
    enumeration_minimum,
    explain,
    solve as solve_instance,
)
from .scenario import (
    Scenario,
    assemble_instance,
    load_matrix_file,
    load_scenario,
    placement_fingerprint,
    plan_to_json,
    save_matrix_file,
    scenario_from_dict,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_PARTIAL = 3
EXIT_ORACLE_MISMATCH = 4
EXIT_TOO_LARGE = 5


def _fmt_seconds(seconds: int) -> str:
    return f"{seconds // 60:d}:{seconds % 60:02d}"


def _load_scenario_checked(path: str) -> Scenario | int:
    """Load a scenario, mapping failures onto the exit-code contract."""
    try:
        return load_scenario(path)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SchemaViolation, GraphViolation) as exc:
        print(f"invalid: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION


def cmd_validate(args) -> int:
    try:
        load_scenario(args.scenario)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SchemaViolation, GraphViolation) as exc:
        print(f"violation: {exc.message}")
        return EXIT_VALIDATION
    print("scenario ok")
    return EXIT_OK


def _print_plan_summary(scenario: Scenario, plan) -> None:
    instance = assemble_instance(scenario.snapshot, scenario.graph, scenario.constraints)
    report = explain(instance, plan)
    print(f"status: {plan.status.value} ({plan.solver})")
    u, t, v = plan.objective
    print(f"objective: uncovered_weight={u} total_time={t}s vehicles={v}")
    if plan.assignments:
        header = (
            f"{'resource':<22} {'rescue point':<16} {'shelter':<14} "
            f"{'to rp':>7} {'to shelter':>11} {'load':>5} {'eta':>6}"
        )
        print(header)
        print("-" * len(header))
        for a in plan.assignments:
            eta = a.t_to_rp + a.t_rp_to_shelter
            load = f"{a.evacuees_loaded}" + (
                f" ({a.wheelchair_loaded}w)" if a.wheelchair_loaded else ""
            )
            print(
                f"{a.resource:<22} {a.rescue_point:<16} {a.shelter:<14} "
                f"{_fmt_seconds(a.t_to_rp):>7} {_fmt_seconds(a.t_rp_to_shelter):>11} "
                f"{load:>5} {_fmt_seconds(eta):>6}"
            )
    for shortage in report.shortages:
        print(
            f"shortage: {shortage.rescue_point} misses {shortage.evacuees_left} "
            f"(+{shortage.wheelchair_left} wheelchair) — {shortage.reason} "
            f"(fleet capacity {shortage.fleet_capacity})"
        )
    if plan.solver == "heuristic":
        print(f"lower bound on total time: {plan.lower_bound_s}s")


def cmd_solve(args) -> int:
    scenario = _load_scenario_checked(args.scenario)
    if isinstance(scenario, int):
        return scenario
    matrices = None
    if args.matrix:
        try:
            fingerprint, to_rp, rp_to_shelter = load_matrix_file(args.matrix)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read matrix file: {exc}", file=sys.stderr)
            return EXIT_IO
        except EvacError as exc:
            print(f"invalid matrix file: {exc.message}", file=sys.stderr)
            return EXIT_VALIDATION
        current = placement_fingerprint(scenario.snapshot, scenario.graph)
        if fingerprint != current:
            print(
                "stale matrix: placement fingerprint mismatch "
                f"(file {fingerprint[:12]}…, scenario {current[:12]}…)",
                file=sys.stderr,
            )
            return EXIT_VALIDATION
        matrices = (to_rp, rp_to_shelter)
    config = scenario.config
    if args.makespan:
        config = SolverConfig(exact_bound=config.exact_bound, makespan=True)
    try:
        instance = assemble_instance(
            scenario.snapshot, scenario.graph, scenario.constraints, matrices
        )
        plan = solve_instance(instance, config)
    except EvacError as exc:
        print(f"invalid: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.output:
        try:
            Path(args.output).write_text(plan_to_json(plan), encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write plan: {exc}", file=sys.stderr)
            return EXIT_IO
    _print_plan_summary(scenario, plan)
    return EXIT_PARTIAL if plan.status is PlanStatus.PARTIAL_COVERAGE else EXIT_OK


def _oracle_compare(scenario: Scenario) -> tuple[bool, tuple, tuple]:
    instance = assemble_instance(scenario.snapshot, scenario.graph, scenario.constraints)
    plan = solve_instance(instance, scenario.config)
    oracle = enumeration_minimum(instance, makespan=scenario.config.makespan)
    return plan.objective == oracle, plan.objective, oracle


def cmd_oracle(args) -> int:
    if args.random:
        matches = 0
        for seed in batch_seeds(args.seed, args.random):
            scenario = scenario_from_dict(random_scenario_dict(seed))
            ok, got, want = _oracle_compare(scenario)
            if ok:
                matches += 1
            else:
                print(f"mismatch at seed {seed}: solver {got} oracle {want}")
        print(f"{matches}/{args.random} matches (seed {args.seed})")
        return EXIT_OK if matches == args.random else EXIT_ORACLE_MISMATCH
    if not args.scenario:
        print("error: oracle needs a scenario path or --random N", file=sys.stderr)
        return EXIT_IO
    scenario = _load_scenario_checked(args.scenario)
    if isinstance(scenario, int):
        return scenario
    try:
        ok, got, want = _oracle_compare(scenario)
    except InstanceTooLarge as exc:
        print(f"too large: {exc.message}", file=sys.stderr)
        return EXIT_TOO_LARGE
    print(f"solver objective: {got}")
    print(f"oracle objective: {want}")
    return EXIT_OK if ok else EXIT_ORACLE_MISMATCH


def cmd_matrix(args) -> int:
    scenario = _load_scenario_checked(args.scenario)
    if isinstance(scenario, int):
        return scenario
    try:
        save_matrix_file(scenario, args.output)
    except OSError as exc:
        print(f"error: cannot write matrix: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"matrix written to {args.output}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .kb import KnowledgeBase, load_snapshot
    from .recommender import ConstraintSet
    from .roadnet import load_graph
    from .service import create_app

    try:
        raw = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
        if {"snapshot", "snapshot_path", "graph", "graph_path"} & set(raw):
            scenario = load_scenario(args.scenario)
            snapshot, graph = scenario.snapshot, scenario.graph
            constraints, config = scenario.constraints, scenario.config
        else:
            snapshot = load_snapshot(args.scenario)
            if not args.graph:
                print("error: --graph is required with a bare snapshot", file=sys.stderr)
                return EXIT_IO
            graph = load_graph(args.graph)
            constraints, config = ConstraintSet(), SolverConfig()
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read inputs: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SchemaViolation, GraphViolation) as exc:
        print(f"invalid: {exc.message}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.exact_bound is not None:
        config = SolverConfig(exact_bound=args.exact_bound, makespan=config.makespan)
    app = create_app(
        KnowledgeBase(snapshot),
        graph,
        constraints=constraints,
        config=config,
        console_dir=args.console,
    )
    port = args.port if args.port is not None else int(os.environ.get("EVACREC_PORT", "8080"))
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evacrec",
        description="Allocate volunteer driver/vehicle pairs to rescue points and shelters.",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for random batches")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a scenario file")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="solve a scenario and write the plan")
    p.add_argument("scenario")
    p.add_argument("--output", help="write the plan JSON here")
    p.add_argument("--matrix", help="reuse a precomputed matrix file")
    p.add_argument("--makespan", action="store_true", help="minimize the longest trip instead of the sum")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="compare the solver against exhaustive enumeration")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--random", type=int, metavar="N", help="run N seeded random instances")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("matrix", help="precompute the travel-time matrices")
    p.add_argument("scenario")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--scenario", required=True, help="scenario or snapshot file")
    p.add_argument("--graph", help="road graph file (with a bare snapshot)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--exact-bound", type=int, default=None)
    p.add_argument("--console", help="directory of built console assets to serve at /")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
