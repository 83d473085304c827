"""Command-line front end.

Subcommands: stats (graph and betweenness summary), discover, bench, export.
Exit codes: 0 success, 1 runtime failure, 2 usage error. Errors go to
standard error as one-line messages, never stack traces.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bench import bench_to_csv, bench_to_json, run_bench
from .discovery import DiscoveryConfig, discover
from .graph import EdgeListParseError, Graph, largest_component, parse_edge_list
from .models import Backbone
from .pathstats import canonical_paths_stats, vertex_betweenness

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netbone",
        description="Discover network backbones from shortest-path traffic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("input", help="edge-list file (two labels per line)")
        p.add_argument(
            "--no-largest-component", dest="largest_component",
            action="store_false", default=True,
            help="keep the whole graph instead of its largest component",
        )

    p_stats = sub.add_parser("stats", help="graph and betweenness summary")
    add_common(p_stats)
    p_stats.add_argument("--output", help="write JSON here instead of stdout")

    p_disc = sub.add_parser("discover", help="run a discovery method")
    add_common(p_disc)
    p_disc.add_argument("--method", choices=["vb", "mcg", "iter"], required=True)
    p_disc.add_argument("--k", type=int, required=True, help="backbone size")
    p_disc.add_argument("--seed", type=int, default=0)
    p_disc.add_argument("--restarts", type=int, default=5)
    p_disc.add_argument("--max-refine-iters", type=int, default=None)
    p_disc.add_argument("--trace", action="store_true", help="include the trace")
    p_disc.add_argument("--output", help="write report JSON here")
    p_disc.add_argument("--dot", help="write an annotated DOT file here")

    p_bench = sub.add_parser("bench", help="timing harness on synthetic graphs")
    p_bench.add_argument("--sizes", type=int, nargs="+", required=True)
    p_bench.add_argument("--m", type=int, default=4)
    p_bench.add_argument("--k", type=int, required=True)
    p_bench.add_argument(
        "--methods", nargs="+", choices=["vb", "mcg", "iter"],
        default=["mcg", "iter"],
    )
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--output", help="write JSON here instead of stdout")
    p_bench.add_argument("--csv", help="also write a CSV here")

    p_exp = sub.add_parser("export", help="re-emit the parsed edge list")
    add_common(p_exp)
    p_exp.add_argument("--output", help="write here instead of stdout")
    return parser


def _load_graph(args) -> Graph:
    with open(args.input, "rb") as fh:
        g = parse_edge_list(fh.read())
    if args.largest_component:
        g = largest_component(g)
    return g


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def export_dot(g: Graph, backbone: Backbone | None) -> str:
    """Deterministic DOT text with backbone vertices and edges attributed."""
    bverts = set(backbone.vertices) if backbone else set()
    beids = set(backbone.edge_ids) if backbone else set()
    lines = ["graph netbone {"]
    for v in range(g.vertex_count):
        attr = ' [class="backbone", penwidth=3]' if v in bverts else ""
        lines.append(f'  "{g.labels[v]}"{attr};')
    for eid in range(g.num_edges):
        u, v = (int(x) for x in g.edges[eid])
        attr = ' [class="backbone", penwidth=3]' if eid in beids else ""
        lines.append(f'  "{g.labels[u]}" -- "{g.labels[v]}"{attr};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _cmd_stats(args) -> int:
    g = _load_graph(args)
    stats = canonical_paths_stats(g)
    bc = vertex_betweenness(g)
    top = sorted(range(g.vertex_count), key=lambda v: (-bc[v], v))[:10]
    doc = {
        "vertices": g.vertex_count,
        "edges": g.num_edges,
        "total_paths": stats.total_paths,
        "top_betweenness": [
            {"vertex": g.labels[v], "betweenness": bc[v]} for v in top
        ],
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return EXIT_OK


def _cmd_discover(args) -> int:
    g = _load_graph(args)
    config = DiscoveryConfig(
        method=args.method, k=args.k, seed=args.seed, restarts=args.restarts,
        max_refine_iters=args.max_refine_iters,
    )
    config.validate(g)
    stats = canonical_paths_stats(g)
    result = discover(g, stats, config)
    doc = result.report.to_dict()
    doc["method"] = args.method
    doc["seed"] = args.seed
    doc["discover_seconds"] = result.discover_seconds
    if args.trace:
        doc["trace"] = result.trace
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    if args.dot:
        _emit(export_dot(g, result.backbone), args.dot)
    return EXIT_OK


def _cmd_bench(args) -> int:
    results = run_bench(args.sizes, args.m, args.k, args.methods, args.seed)
    _emit(bench_to_json(results) + "\n", args.output)
    if args.csv:
        _emit(bench_to_csv(results), args.csv)
    return EXIT_OK


def _cmd_export(args) -> int:
    g = _load_graph(args)
    _emit(g.export_edge_list(), args.output)
    return EXIT_OK


_COMMANDS = {
    "stats": _cmd_stats,
    "discover": _cmd_discover,
    "bench": _cmd_bench,
    "export": _cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "command", None) == "discover" and args.k < 1:
        print("error: K must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (EdgeListParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
