"""Command-line front end.

Exit codes: 0 success, 1 bad parameters or input, 2 infeasible result,
3 enumeration capacity exceeded.
"""
from __future__ import annotations

import argparse
import datetime
import sys
from pathlib import Path

from . import __version__
from .bounds import bound_report
from .domains import Box, CapacityError, DomainSpec, doignon_square_family, verify_helly_witness
from .io import (body_from_json, box_from_json, constraint_from_json, domain_from_json, dump_json,
                 load_json, problem_from_json, read_edge_list)
from .oracles import solve_subproblem
from .problems import find_coloring
from .scenario import ENGINES, ExperimentReport, experiment, run_ccp

EXIT_PARAM = 1
EXIT_INFEASIBLE = 2
EXIT_CAPACITY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def _emit(args, payload: dict, out=None) -> None:
    if not args.no_meta:
        payload = dict(payload, meta={
            "version": __version__, "verb": args.verb, "seed": getattr(args, "seed", None),
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        })
    text = dump_json(payload)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _lipschitz(text: str) -> tuple[int, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected n,L,D,gamma")
    return int(parts[0]), float(parts[1]), float(parts[2]), float(parts[3])


def cmd_bounds(args) -> int:
    report = bound_report(args.h, args.eps, args.delta, args.r, args.card, args.lipschitz)
    _emit(args, report.to_dict())
    return 0


def cmd_solve(args) -> int:
    problem = problem_from_json(load_json(args.problem))
    run = run_ccp(problem, args.engine, args.seed, witness=args.witness)
    _emit(args, run.to_dict())
    return 0 if run.solution.is_optimal else EXIT_INFEASIBLE


def cmd_experiment(args) -> int:
    problem = problem_from_json(load_json(args.problem))
    report = experiment(problem, args.trials, args.engine, args.seed)
    _emit(args, report.to_dict(), args.out)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return 0


def cmd_report(args) -> int:
    data = load_json(args.input)
    data.pop("meta", None)
    report = ExperimentReport(**data)
    if args.csv:
        sys.stdout.write(report.to_csv())
    else:
        _emit(args, report.to_dict())
    return 0


def cmd_witness(args) -> int:
    if args.doignon:
        spec, family, box = DomainSpec.integers(2), doignon_square_family(), Box.uniform(2, -2, 3)
    else:
        data = load_json(args.input)
        spec = domain_from_json(data["domain"])
        family = [body_from_json(b) for b in data["family"]]
        box = box_from_json(data["box"])
    verdict = verify_helly_witness(spec, family, box)
    _emit(args, {"witness": verdict, "family_size": len(family),
                 "certifies_helly_at_least": len(family) if verdict else None})
    return 0


def cmd_color(args) -> int:
    edges, n = read_edge_list(Path(args.graph).read_text())
    n = max(n, args.vertices or 0)
    coloring = find_coloring(edges, n, args.k)
    if args.json:
        _emit(args, {"k": args.k, "vertices": n, "colorable": coloring is not None,
                     "coloring": None if coloring is None else list(coloring)})
    elif coloring is None:
        print(f"not {args.k}-colorable")
    else:
        print(" ".join(str(c) for c in coloring))
    return 0 if coloring is not None else EXIT_INFEASIBLE


def cmd_solve_sub(args) -> int:
    data = load_json(args.input)
    sol = solve_subproblem(data["objective"],
                           [constraint_from_json(c) for c in data.get("constraints", [])],
                           body_from_json(data["K"]), domain_from_json(data["domain"]))
    _emit(args, sol.to_dict())
    return 0 if sol.is_optimal else EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--no-meta", action="store_true",
                        help="omit the timestamp/version block so output is byte-stable")
    parser = _Parser(prog="shelly", description="Scenario sampling over generalized domains.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", parents=[common], help="sample-size bounds")
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--card", type=int, help="|K cap S| for the finite-set comparison bound")
    p.add_argument("--lipschitz", type=_lipschitz, metavar="n,L,D,gamma")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("solve", parents=[common], help="one scenario run")
    p.add_argument("--problem", required=True)
    p.add_argument("--engine", choices=ENGINES, default="direct")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--witness", action="store_true", help="extract witness constraints")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", parents=[common], help="repeated runs with certification")
    p.add_argument("--problem", required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--engine", choices=ENGINES, default="direct")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--csv", help="also write the per-trial CSV here")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", parents=[common], help="re-emit a saved experiment report")
    p.add_argument("--input", required=True)
    p.add_argument("--csv", action="store_true", help="per-trial CSV instead of JSON")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("witness", parents=[common], help="check a Helly witness family")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--input")
    g.add_argument("--doignon", action="store_true", help="the four-triangle family on Z^2")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("color", parents=[common], help="K-coloring via lattice exclusions")
    p.add_argument("--graph", required=True, help="edge list, 'u v' per line, 0-indexed")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--vertices", type=int, help="vertex count when isolated vertices exist")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("solve-sub", parents=[common], help="solve one deterministic subproblem")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_solve_sub)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"shelly: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ValueError, TypeError, KeyError, OSError) as exc:
        print(f"shelly: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
