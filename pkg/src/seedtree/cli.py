"""Command line driver.

    seedtree simulate --capacity 4 --occupancy 0.5 --locality 0.6
    seedtree sweep --capacity 2,4,8,16 --occupancy 0.5 --locality 0,0.3,0.6,0.9
    seedtree gen-trace --items 4095 --requests 100000 --locality 0.9 --output t.txt
    seedtree ingest --trace fb.csv --format pairs --output t.txt
    seedtree export-matchings --capacity 2 --items 15 --output m.txt
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .experiment import ExperimentConfig, format_csv, run, sweep
from .matching import dumps, export
from .traces import emit_trace, generate_trace, ingest_trace
from .tree import SeedTree


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _write(text: str, output) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _common(p: argparse.ArgumentParser, lists: bool = False) -> None:
    p.add_argument("--capacity", type=_ints if lists else int, default=[4] if lists else 4)
    p.add_argument("--occupancy", type=_floats if lists else float, default=[0.5] if lists else 0.5)
    p.add_argument("--locality", type=_floats if lists else float, default=[0.0] if lists else 0.0)
    p.add_argument("--items", type=int, default=4095)
    p.add_argument("--requests", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--trace", default=None, help="read requests from a file instead of generating")
    p.add_argument("--format", default="items", choices=["items", "pairs"])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", "-o", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seedtree")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("simulate", help="run one configuration, write CSV"))
    _common(sub.add_parser("sweep", help="cross product of comma-separated values"), lists=True)

    g = sub.add_parser("gen-trace", help="write a synthetic trace")
    g.add_argument("--items", type=int, default=4095)
    g.add_argument("--requests", type=int, default=100_000)
    g.add_argument("--locality", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", "-o", required=True)

    i = sub.add_parser("ingest", help="convert a raw trace to the canonical format")
    i.add_argument("--trace", required=True)
    i.add_argument("--format", default="items", choices=["items", "pairs"])
    i.add_argument("--output", "-o", required=True)

    e = sub.add_parser("export-matchings", help="dump the matching encoding of a fresh tree")
    e.add_argument("--capacity", type=int, default=2)
    e.add_argument("--occupancy", type=float, default=0.5)
    e.add_argument("--items", type=int, default=15)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--trace", default=None, help="replay this trace before exporting")
    e.add_argument("--format", default="items", choices=["items", "pairs"])
    e.add_argument("--output", "-o", default=None)
    return parser


def _config(args, **over) -> ExperimentConfig:
    cfg = ExperimentConfig(
        capacity=args.capacity,
        occupancy=args.occupancy,
        locality=args.locality,
        n_items=args.items,
        requests=args.requests,
        seed=args.seed,
        repeats=args.repeats,
        trace_path=args.trace,
        trace_format=args.format,
    )
    return replace(cfg, **over) if over else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            cfg = _config(args)
            rows = run(cfg, jobs=args.jobs)
            _write(format_csv(rows, {"config": cfg}), args.output)
        elif args.command == "sweep":
            base = _config(args, capacity=args.capacity[0], occupancy=args.occupancy[0], locality=args.locality[0])
            rows = sweep(base, args.capacity, args.occupancy, args.locality, jobs=args.jobs)
            meta = {
                "base": base,
                "capacities": args.capacity,
                "occupancies": args.occupancy,
                "localities": args.locality,
            }
            _write(format_csv(rows, meta), args.output)
        elif args.command == "gen-trace":
            emit_trace(generate_trace(args.items, args.requests, args.locality, args.seed), args.output)
        elif args.command == "ingest":
            emit_trace(ingest_trace(args.trace, args.format), args.output)
        elif args.command == "export-matchings":
            if args.trace is not None:
                trace = ingest_trace(args.trace, args.format)
                tree = SeedTree.build(range(trace.n_items), args.capacity, args.occupancy, args.seed)
                for v in trace.tolist():
                    tree.access(v)
            else:
                tree = SeedTree.build(range(args.items), args.capacity, args.occupancy, args.seed)
            _write(dumps(export(tree)), args.output)
    except (OSError, ValueError, RuntimeError) as e:
        print(f"seedtree: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
