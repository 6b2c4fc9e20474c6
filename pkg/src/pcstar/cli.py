"""Command-line interface.

Exit codes: 0 success, 1 comparison failure, 2 usage error,
3 resource or genericity error.
"""

from __future__ import annotations

import argparse
import json
import logging
import secrets
import sys
from pathlib import Path

from . import bench as bench_mod
from . import io
from .discovery import PcstarOptions, pc, pcstar
from .errors import GenerationError, GenericityError, GraphError, InconsistencyError, ResourceError
from .random_models import GenConfig, random_weighted_dag
from .separation import CRITERIA, SeparationOracle, global_markov

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = secrets.randbits(63)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def cmd_gen(args) -> int:
    if args.nodes < 2 or args.max_indegree < 1:
        raise UsageError("--nodes must be >= 2 and --max-indegree >= 1")
    seed = _seed(args)
    w = random_weighted_dag(GenConfig(n=args.nodes, d=args.max_indegree, seed=seed))
    _emit(io.dumps(io.graph_to_dict(io.GraphFile(w))), args.out)
    return EXIT_OK


def _load(args, criterion: str) -> io.GraphFile:
    g = io.read_graph(args.graph)
    if criterion == "cstar" and not g.weighted:
        raise UsageError("the cstar criterion needs edge weights in the graph file")
    return g


def cmd_markov(args) -> int:
    g = _load(args, args.criterion)
    model = g.model if args.criterion == "cstar" else g.dag
    stmts = global_markov(model, args.criterion, args.max_cond_size)
    _emit(io.dumps(io.statements_to_list(stmts, g)), args.out)
    return EXIT_OK


def cmd_discover(args) -> int:
    g = _load(args, args.oracle)
    model = g.model if args.oracle == "cstar" else g.dag
    oracle = SeparationOracle(model, args.oracle)
    if args.oracle == "cstar":
        result = pcstar(oracle, g.model.n, PcstarOptions(cycles=args.cycles, max_cycle_len=args.max_cycle_len))
    else:
        result = pc(oracle, g.model.n)
    if args.format == "dot":
        text = io.pdag_to_dot(result.cpdag, g)
    else:
        doc = io.pdag_to_dict(result.cpdag, g)
        doc["stats"] = {k: v for k, v in result.stats.items()}
        text = io.dumps(doc)
    _emit(text, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    kinds = [k.strip() for k in args.oracles.split(",")]
    if len(kinds) != 2 or any(k not in CRITERIA for k in kinds):
        raise UsageError("--oracles takes two criteria, e.g. d,star")
    g = io.read_graph(args.graph)
    if "cstar" in kinds and not g.weighted:
        raise UsageError("the cstar criterion needs edge weights in the graph file")
    results = []
    for kind in kinds:
        model = g.model if kind == "cstar" else g.dag
        results.append(pc(SeparationOracle(model, kind), g.model.n).cpdag)
    a, b = results
    diff = {
        "directed_only_in_" + kinds[0]: sorted(a.directed - b.directed),
        "directed_only_in_" + kinds[1]: sorted(b.directed - a.directed),
        "undirected_only_in_" + kinds[0]: sorted(a.undirected - b.undirected),
        "undirected_only_in_" + kinds[1]: sorted(b.undirected - a.undirected),
    }
    same = not any(diff.values())
    report = {"identical": same, "oracles": kinds, "differences": {k: v for k, v in diff.items() if v}}
    _emit(io.dumps(report), args.out)
    return EXIT_OK if same else EXIT_MISMATCH


def cmd_bench(args) -> int:
    seed = _seed(args)
    rows, outcomes = bench_mod.run_bench(args.nodes, args.max_indegree, args.replicates, seed, args.workers)
    if args.csv and args.csv != "-":
        with open(args.csv, "w", newline="") as fh:
            bench_mod.write_rows(fh, rows)
    else:
        bench_mod.write_rows(sys.stdout, rows)
    if args.raw_csv:
        with open(args.raw_csv, "w", newline="") as fh:
            bench_mod.write_raw(fh, outcomes)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcstar", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random weighted DAG as JSON")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--max-indegree", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("markov", help="enumerate the global Markov property")
    p.add_argument("--graph", required=True)
    p.add_argument("--criterion", choices=CRITERIA, required=True)
    p.add_argument("--max-cond-size", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_markov)

    p = sub.add_parser("discover", help="run PC (d, star) or PCstar (cstar) against an oracle on the graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--oracle", choices=CRITERIA, required=True)
    p.add_argument("--cycles", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--max-cycle-len", type=int)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("compare", help="check that PC returns the same CPDAG under two oracles")
    p.add_argument("--graph", required=True)
    p.add_argument("--oracles", default="d,star")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="benchmark PCstar on random weighted DAGs")
    p.add_argument("--nodes", type=_int_list, required=True)
    p.add_argument("--max-indegree", type=_int_list, required=True)
    p.add_argument("--replicates", type=int, default=50)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv")
    p.add_argument("--raw-csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pcstar {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GenericityError, ResourceError, GenerationError, InconsistencyError) as exc:
        print(f"pcstar {args.command}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (GraphError, OSError) as exc:
        print(f"pcstar {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
