"""Normalized access cost (seedtree / oblivious) on a src,dst communication
trace, restricted to its most frequent source.

    python scripts/real_trace.py cluster.csv --capacities 2,4,8,12,16
"""
import argparse
import warnings

from seedtree.experiment import simulate
from seedtree.traces import ingest_trace


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("path")
    ap.add_argument("--format", default="pairs", choices=["pairs", "items"])
    ap.add_argument("--capacities", default="2,4,8,12,16")
    ap.add_argument("--occupancies", default="0.5")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    warnings.simplefilter("ignore", RuntimeWarning)

    trace = ingest_trace(args.path, args.format)
    print(f"{len(trace)} requests over {trace.n_items} destinations")
    for c in (int(x) for x in args.capacities.split(",")):
        for f in (float(x) for x in args.occupancies.split(",")):
            res = simulate(trace, c, f, args.seed)
            norm = res.ledger.access / max(res.oblivious.access, 1)
            print(f"c={c:<3} f={f:<5} normalized access={norm:.3f} total={res.ledger.total}")


if __name__ == "__main__":
    main()
