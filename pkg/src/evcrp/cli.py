"""Command-line entry point: ``evcrp {validate,enumerate,sample,solve,hamiltonian}``.

Exit codes: 0 success, 1 I/O or parse error, 2 schema violation,
3 infeasible, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import encoding, formats, hamiltonian, sampler, search
from .model import GRID_BOUNDS, replace, toy_instance, validate_instance

EXIT_OK, EXIT_IO, EXIT_SCHEMA, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 1, 2, 3, 4

STRATEGY_NAMES = {
    "constant": sampler.CONSTANT,
    "decreasing": sampler.SWEEP_DECREASING,
    "increasing": sampler.SWEEP_INCREASING,
    "boyer": sampler.BOYER_RANDOM,
}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _lambdas(text: str) -> List[Fraction]:
    parts = [Fraction(p) for p in text.split(",")]
    if len(parts) == 1:
        parts *= 5
    if len(parts) != 5:
        raise argparse.ArgumentTypeError("give one value or five comma-separated values")
    if any(x <= 0 for x in parts):
        raise argparse.ArgumentTypeError(f"penalty weights must be positive, got {text}")
    return parts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("-i", "--instance", metavar="PATH", help="instance JSON file")
    src.add_argument("--toy", action="store_true", help="use the built-in 4-car toy instance")
    common.add_argument("-o", "--output", metavar="PATH", help="write the data product here")
    common.add_argument("--threads", type=_positive, default=os.cpu_count() or 1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument(
        "--grid-bounds", choices=GRID_BOUNDS, help="override how the fleet power limit is read"
    )
    common.add_argument("--budget", type=_positive, default=hamiltonian.DEFAULT_BUDGET,
                        help="largest per-vehicle basis to scan exhaustively")

    parser = argparse.ArgumentParser(prog="evcrp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check an instance file")

    p = sub.add_parser("enumerate", parents=[common], help="list feasible partial solutions")
    p.add_argument("--vehicle", type=_positive, help="1-based vehicle number (default: all)")

    p = sub.add_parser("sample", parents=[common], help="simulate Grover sampling")
    target = p.add_mutually_exclusive_group()
    target.add_argument("--vehicle", type=_positive, default=1)
    target.add_argument("--synthetic-k", type=_positive, metavar="K",
                        help="use K synthetic targets instead of a vehicle's pool")
    p.add_argument("--dim", type=_positive, help="Hilbert dimension for --synthetic-k")
    p.add_argument("--strategy", choices=sorted(STRATEGY_NAMES), default="decreasing")
    p.add_argument("--classical", action="store_true", help="random-guessing baseline instead")
    p.add_argument("--benchmark", action="store_true", help="aggregate all four strategies")
    p.add_argument("--seeds", type=_positive, default=50, help="seed count for --benchmark")
    p.add_argument("--max-runs", type=_positive, default=5000)
    p.add_argument("--stop-after", type=_positive)

    p = sub.add_parser("solve", parents=[common], help="combine partial solutions")
    p.add_argument("--method", choices=("brute", "greedy", "both"), default="both")
    p.add_argument("--max-level", type=int)
    p.add_argument("--first-hit", action="store_true",
                   help="greedy returns the first feasible tuple of a level, not the cheapest")
    p.add_argument("--stats", metavar="PATH", help="write the brute-force cost histogram CSV")

    p = sub.add_parser("hamiltonian", parents=[common], help="lowest-energy basis states")
    p.add_argument("--vehicle", type=_positive, default=1)
    p.add_argument("--variant", choices=hamiltonian.VARIANTS, default=hamiltonian.INDICATOR)
    p.add_argument("--lambda", dest="lambdas", type=_lambdas, default=[Fraction(100)] * 5)
    p.add_argument("--top", type=_positive, default=10)
    return parser


def _load(args):
    if args.toy:
        inst = toy_instance()
    else:
        try:
            with open(args.instance, encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise CliError(EXIT_IO, f"cannot read {args.instance}: {e.strerror}")
        try:
            inst = formats.parse_instance(text)
        except json.JSONDecodeError as e:
            raise CliError(EXIT_IO, f"{args.instance}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}")
        except formats.SchemaError as e:
            raise CliError(EXIT_SCHEMA, "\n".join(f"schema: {p}" for p in e.problems))
    if args.grid_bounds:
        inst = replace(inst, grid_bounds=args.grid_bounds)
    report = validate_instance(inst)
    if not report.valid:
        raise CliError(EXIT_SCHEMA, "\n".join(f"invalid: {p}" for p in report.problems))
    return inst


def _vehicle(inst, number: int) -> int:
    if number > inst.num_vehicles:
        raise CliError(EXIT_SCHEMA, f"vehicle {number} does not exist (instance has {inst.num_vehicles})")
    return number - 1


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    inst = _load(args)
    print(f"valid: {inst.num_vehicles} vehicles, {inst.num_steps} steps, {inst.num_nodes} nodes")
    return EXIT_OK


def _pools(inst, args, vehicles=None):
    if vehicles is None:
        return search.enumerate_all(inst, args.budget, args.threads)
    return [search.enumerate_feasible(inst, n, args.budget) for n in vehicles]


def cmd_enumerate(args) -> int:
    inst = _load(args)
    vehicles = None if args.vehicle is None else [_vehicle(inst, args.vehicle)]
    pools = _pools(inst, args, vehicles)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(formats.dumps(formats.pools_to_dict(pools)))
    print(" ".join(str(len(p)) for p in pools))
    return EXIT_INFEASIBLE if any(len(p) == 0 for p in pools) else EXIT_OK


def cmd_sample(args) -> int:
    inst = _load(args)
    if args.synthetic_k:
        dim = args.dim or encoding.search_space_size(inst, include_initial=True)
        if args.synthetic_k > dim:
            raise CliError(EXIT_SCHEMA, f"K={args.synthetic_k} exceeds dimension {dim}")
        problem = sampler.SamplingProblem.synthetic(dim, args.synthetic_k)
    else:
        n = _vehicle(inst, args.vehicle)
        pool = search.enumerate_feasible(inst, n, args.budget)
        if len(pool) == 0:
            print(f"vehicle {args.vehicle} has no feasible partial solution", file=sys.stderr)
            return EXIT_INFEASIBLE
        dim = encoding.layout_for_vehicle(inst).total_dimension
        problem = sampler.SamplingProblem(dim, tuple(e.index for e in pool.entries))

    if args.benchmark:
        strategies = [sampler.Strategy(k) for k in sampler.STRATEGIES]
        curves = sampler.strategy_benchmark(
            problem, strategies, args.seeds, args.max_runs, first_seed=args.seed, threads=args.threads
        )
        _emit(args, formats.benchmark_csv(curves))
        for name, c in curves.items():
            print(f"{name}: median runs to collect all {c.median_runs_to_collect_all}", file=sys.stderr)
        return EXIT_OK
    if args.classical:
        trace = sampler.classical_baseline(problem, args.seed, args.max_runs, args.stop_after)
    else:
        strategy = sampler.Strategy(STRATEGY_NAMES[args.strategy])
        trace = sampler.simulate_sampling(problem, strategy, args.seed, args.max_runs, args.stop_after)
    _emit(args, formats.trace_csv(trace))
    print(
        f"{trace.strategy}: found {len(trace.found)} of {problem.K} in {len(trace.runs)} runs ({trace.reason})",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args)
    pools = _pools(inst, args)
    print("pool sizes: " + " ".join(str(len(p)) for p in pools))
    out = {}
    optimum = None
    if args.method in ("brute", "both"):
        best, stats = search.brute_force(inst, pools)
        optimum = best.cost
        out["brute"] = formats.result_to_dict(best)
        out["stats"] = {
            "total_combinations": stats.total_combinations,
            "feasible_combinations": stats.feasible_combinations,
            "cost_minimum": formats.format_rational(stats.cost_minimum),
            "cost_maximum": formats.format_rational(stats.cost_maximum),
        }
        print(
            f"brute: cost {formats.format_rational(best.cost)}; "
            f"{stats.feasible_combinations} of {stats.total_combinations} combinations feasible; "
            f"costs {formats.format_rational(stats.cost_minimum)}..{formats.format_rational(stats.cost_maximum)}"
        )
        if args.stats:
            with open(args.stats, "w", encoding="utf-8", newline="") as f:
                f.write(formats.stats_csv(stats))
    if args.method in ("greedy", "both"):
        g = search.greedy_tree(inst, pools, args.max_level, args.first_hit)
        out["greedy"] = formats.result_to_dict(g)
        line = f"greedy: cost {formats.format_rational(g.cost)} at level {g.level_reached}"
        if optimum is not None and optimum > 0:
            ratio = search.approximation_ratio(g, optimum)
            out["approximation_ratio"] = float(ratio)
            line += f"; approximation ratio {float(ratio):.4f}"
        print(line)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(formats.dumps(out))
    return EXIT_OK


def cmd_hamiltonian(args) -> int:
    inst = _load(args)
    n = _vehicle(inst, args.vehicle)
    weights = hamiltonian.PenaltyWeights(tuple(args.lambdas), args.variant)
    states = hamiltonian.lowest_states(inst, n, args.top, weights, args.budget, args.threads)
    _emit(args, formats.energies_csv(inst, n, states))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "enumerate": cmd_enumerate,
    "sample": cmd_sample,
    "solve": cmd_solve,
    "hamiltonian": cmd_hamiltonian,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CliError as e:
        print(e, file=sys.stderr)
        return e.code
    except hamiltonian.BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except search.InfeasibleError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
