"""Total cost against node capacity and locality at f=1/2.

    python scripts/capacity_sweep.py -o capacity.csv
"""
import argparse
import warnings

from seedtree.experiment import ExperimentConfig, format_csv, sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--items", type=int, default=4095)
    ap.add_argument("--requests", type=int, default=100_000)
    ap.add_argument("--capacities", default="2,4,8,16")
    ap.add_argument("--localities", default="0,0.3,0.6,0.9")
    ap.add_argument("--repeats", type=int, default=1)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("-o", "--output", default=None)
    args = ap.parse_args()
    warnings.simplefilter("ignore", RuntimeWarning)

    caps = [int(x) for x in args.capacities.split(",")]
    locs = [float(x) for x in args.localities.split(",")]
    base = ExperimentConfig(n_items=args.items, requests=args.requests, repeats=args.repeats)
    rows = sweep(base, caps, [0.5], locs, jobs=args.jobs)

    print("total cost / 1e6")
    print("c     " + "".join(f"p={p:<8}" for p in locs))
    for c in caps:
        cells = []
        for p in locs:
            sel = [r.total_cost for r in rows if r.c == c and r.locality == p]
            cells.append(f"{sum(sel) / len(sel) / 1e6:<10.3f}")
        print(f"{c:<6}" + "".join(cells))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(format_csv(rows, {"experiment": "capacity", "base": base}))


if __name__ == "__main__":
    main()
