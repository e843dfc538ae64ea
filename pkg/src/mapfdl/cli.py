"""``mapfdl`` command line: solve, generate, verify, bench, export.

Exit codes: 0 success (optimal / valid plan), 1 input error, 2 solve timed
out or hit the node limit, 3 plan failed verification.  The default time
limit comes from ``MAPFDL_TIME_LIMIT`` (seconds) when set, else 60.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from .extract import solve_instance
from .generator import PlacementError, generate_random_instance
from .ilp import build_compact_ilp, export_lp, export_mps
from .instance import (
    InstanceError,
    ParseError,
    PlanShapeError,
    format_plan,
    map_text,
    parse_grid_map,
    parse_plan,
    scenario_text,
    validate_plan,
)
from .network import build_abstracted_network, build_full_network, commodity_edges, reduce_network
from .solver import STATUS_OPTIMAL, SolverConfig

EXIT_OK, EXIT_INPUT, EXIT_TIMEOUT, EXIT_INVALID = 0, 1, 2, 3
TIME_LIMIT_ENV = "MAPFDL_TIME_LIMIT"


def default_time_limit() -> float:
    raw = os.environ.get(TIME_LIMIT_ENV)
    return float(raw) if raw else 60.0


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _add_model_flags(p):
    p.add_argument("--deadline", type=int, required=True, help="deadline T (time steps)")
    p.add_argument("--no-reduction", action="store_true", help="skip the reachability reduction")
    p.add_argument("--per-commodity", type=_on_off, default=True, metavar="on|off",
                   help="restrict each agent's variables to edges it can use (default on)")
    p.add_argument("--formulation", choices=("abstracted", "full"), default="abstracted")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mapfdl", description="Multi-agent path finding with deadlines.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a map + scenario optimally")
    p.add_argument("map")
    p.add_argument("scenario")
    _add_model_flags(p)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--plan", default=None, help="plan output path (default: <scenario>.plan)")
    p.add_argument("--export-mps", default=None, metavar="PATH")
    p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("generate", help="write a random grid map and scenario")
    p.add_argument("--width", type=int, default=20)
    p.add_argument("--height", type=int, default=20)
    p.add_argument("--block-probability", type=float, default=0.2)
    p.add_argument("--agents", type=int, default=4)
    p.add_argument("--distance-min", type=int, required=True)
    p.add_argument("--distance-max", type=int, required=True)
    p.add_argument("--deadline", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--map-out", required=True)
    p.add_argument("--scenario-out", required=True)

    p = sub.add_parser("verify", help="check a plan file against an instance")
    p.add_argument("map")
    p.add_argument("scenario")
    p.add_argument("plan")
    p.add_argument("--deadline", type=int, required=True)

    p = sub.add_parser("bench", help="success-rate benchmark from a key=value config")
    p.add_argument("config")
    p.add_argument("--csv", default=None, help="summary CSV path")
    p.add_argument("--instances-csv", default=None, help="per-instance CSV path")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("export", help="write the model (mps/lp) or network (dot)")
    p.add_argument("map")
    p.add_argument("scenario")
    _add_model_flags(p)
    p.add_argument("--format", choices=("mps", "lp", "dot"), default="mps")
    p.add_argument("--out", required=True)
    return parser


def _load(args):
    return parse_grid_map(Path(args.map).read_text(), Path(args.scenario).read_text(), args.deadline)


def _model_for(instance, args):
    if args.formulation == "full":
        from .ilp import build_full_ilp

        net = build_full_network(instance)
        return net, build_full_ilp(net, instance)
    net, pairs = build_abstracted_network(instance)
    sets = None
    if not args.no_reduction:
        net, pairs, sets = reduce_network(net, pairs, instance)
    if args.per_commodity and sets is None:
        sets = commodity_edges(net, instance)
    return net, build_compact_ilp(net, pairs, instance, sets if args.per_commodity else None)


def cmd_solve(args) -> int:
    instance = _load(args)
    limit = args.time_limit if args.time_limit is not None else default_time_limit()
    config = SolverConfig(time_limit=limit, verbose=args.verbose)
    report = solve_instance(instance, config, use_reduction=not args.no_reduction,
                            use_per_commodity=args.per_commodity, formulation=args.formulation)
    if args.export_mps:
        model = report.model if report.model is not None else _model_for(instance, args)[1]
        Path(args.export_mps).write_text(export_mps(model))
    plan_path = Path(args.plan) if args.plan else Path(args.scenario).with_suffix(".plan")
    plan_path.write_text(format_plan(instance, report.plan))
    print(f"M_succ = {report.m_succ}")
    print(f"status = {report.status}")
    print("timings = " + " ".join(f"{k}={v:.4f}s" for k, v in report.timings.items()))
    if report.sizes:
        print("model = " + " ".join(f"{k}={v}" for k, v in report.sizes.items()))
    print(f"plan written to {plan_path}")
    return EXIT_OK if report.status == STATUS_OPTIMAL else EXIT_TIMEOUT


def cmd_generate(args) -> int:
    inst = generate_random_instance(args.width, args.height, args.block_probability, args.agents,
                                    (args.distance_min, args.distance_max), args.deadline, args.seed)
    Path(args.map_out).write_text(map_text(inst.graph))
    Path(args.scenario_out).write_text(scenario_text(inst))
    print(f"{inst.num_agents} agents on {inst.graph.num_vertices} free cells")
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = _load(args)
    plan = parse_plan(instance, Path(args.plan).read_text())
    problems = validate_plan(instance, plan)
    if not problems:
        print(f"valid: {sum(p is not None for p in plan.paths)} successful agents")
        return EXIT_OK
    for item in problems:
        print(item)
    return EXIT_INVALID


def cmd_bench(args) -> int:
    config = bench_mod.parse_config(Path(args.config).read_text(), seed=args.seed, workers=args.workers,
                                    time_limit=args.time_limit)

    def progress(r):
        print(f"agents={r.agents} instance={r.instance} status={r.status} m_succ={r.m_succ} "
              f"time={r.time:.3f}", file=sys.stderr)

    result = bench_mod.run_benchmark(config, progress if args.verbose else None)
    print(result.table(), end="")
    csv_text = result.summary_csv()
    if args.csv:
        Path(args.csv).write_text(csv_text)
    else:
        print(csv_text, end="")
    if args.instances_csv:
        Path(args.instances_csv).write_text(result.instances_csv())
    return EXIT_OK


def cmd_export(args) -> int:
    instance = _load(args)
    net, model = _model_for(instance, args)
    if args.format == "mps":
        text = export_mps(model)
    elif args.format == "lp":
        text = export_lp(model)
    else:
        text = net.to_dot()
    Path(args.out).write_text(text)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "generate": cmd_generate, "verify": cmd_verify,
            "bench": cmd_bench, "export": cmd_export}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "deadline", 0) is not None and getattr(args, "deadline", 0) < 0:
        print("error: deadline must be >= 0", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except (ParseError, InstanceError, PlanShapeError, PlacementError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
