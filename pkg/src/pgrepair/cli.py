"""Command line entry point.

Exit codes: 0 repaired and maximality-verified, 1 repaired but only
approximately (or maximality unverified), 2 resource cap or solver
timeout, 3 invalid input or configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

from .constraints import load_constraints
from .errors import (
    ConfigError,
    GraphError,
    ParseError,
    ResourceCapExceeded,
    SolverTimeout,
    ValidationError,
)
from .matcher import DEFAULT_MAX_MATCHES
from .model import load_graph, parse_timestamp, save_graph
from .pipeline import SOLVERS, PipelineConfig, run_pipeline
from . import reporting

EXIT_OK = 0
EXIT_APPROXIMATE = 1
EXIT_RESOURCE = 2
EXIT_INPUT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgrepair",
        description="Detect and repair constraint violations in property graphs.",
    )
    parser.add_argument("--graph", required=True, help="input graph JSON file")
    parser.add_argument(
        "--constraints", required=True, help="constraint file (one or more constraints)"
    )
    parser.add_argument(
        "--labels",
        action="store_true",
        help="repair with label deletions (token errors, adjusted weights)",
    )
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--neighbourhood",
        type=int,
        metavar="K",
        help="restrict errors to the K-step endpoint neighbourhoods",
    )
    group.add_argument(
        "--sample",
        type=int,
        metavar="K",
        help="restrict errors to 2K sampled edges plus endpoints",
    )
    parser.add_argument("--solver", choices=SOLVERS, default="ilp")
    parser.add_argument(
        "--approximate",
        action="store_true",
        help="skip the greedy trimming phase",
    )
    parser.add_argument("--custom-weight-key", metavar="KEY")
    parser.add_argument("--now", metavar="ISO8601", help="timestamp for NOW predicates")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-matches", type=int, default=DEFAULT_MAX_MATCHES)
    parser.add_argument("--out", metavar="FILE", help="write the repaired graph")
    parser.add_argument("--report", metavar="FILE", help="write the report JSON")
    parser.add_argument(
        "--timings", action="store_true", help="include timings in the report"
    )
    parser.add_argument(
        "--emit-queries", metavar="FILE", help="write error queries in GQL syntax"
    )
    parser.add_argument(
        "--dump-hypergraph", metavar="FILE", help="write the conflict hypergraph"
    )
    parser.add_argument(
        "--figure", metavar="FILE", help="render a summary figure (png/pdf/svg)"
    )
    parser.add_argument(
        "--deletions-csv", metavar="FILE", help="write the deletions as CSV"
    )
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        graph = load_graph(args.graph)
        constraints = load_constraints(args.constraints)
        now = parse_timestamp(args.now) if args.now else None
        config = PipelineConfig(
            label_mode=args.labels,
            neighbourhood_k=args.neighbourhood,
            sample_k=args.sample,
            solver=args.solver,
            approximate=args.approximate,
            custom_weight_key=args.custom_weight_key,
            now=now,
            seed=args.seed,
            max_matches=args.max_matches,
        )
    except (OSError, json.JSONDecodeError, GraphError, ParseError, ValidationError,
            ConfigError, ValueError) as exc:
        print(f"pgrepair: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        repaired, report = run_pipeline(graph, constraints, config)
    except (ResourceCapExceeded, SolverTimeout) as exc:
        print(f"pgrepair: aborted: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (GraphError, ValidationError, ConfigError) as exc:
        print(f"pgrepair: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        if args.out:
            save_graph(repaired, args.out)
        if args.report:
            reporting.write_report(
                report, constraints, args.report, include_timings=args.timings
            )
        if args.emit_queries:
            reporting.write_queries(constraints, args.emit_queries)
        if args.dump_hypergraph:
            reporting.write_hypergraph(report.hypergraphs, args.dump_hypergraph)
        if args.figure:
            reporting.render_figure(report, args.figure)
        if args.deletions_csv:
            reporting.write_deletions_csv(report, args.deletions_csv)
    except OSError as exc:
        print(f"pgrepair: error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    deletions = report.deletions
    summary = (
        f"{sum(report.error_counts)} error(s); deleted "
        f"{len(deletions.node_deletions)} node(s), "
        f"{len(deletions.edge_deletions)} edge(s), "
        f"{len(deletions.label_deletions)} label(s); "
        f"status {report.solver_status}"
    )
    print(summary)
    if report.satisfied and report.single_object_maximal:
        return EXIT_OK
    return EXIT_APPROXIMATE


if __name__ == "__main__":
    sys.exit(main())
