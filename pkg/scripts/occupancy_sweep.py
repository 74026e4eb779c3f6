"""Total cost against fractional occupancy and locality at c=12.

    python scripts/occupancy_sweep.py --repeats 3 -o occupancy.csv
"""
import argparse
import warnings

from seedtree.experiment import ExperimentConfig, format_csv, sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--items", type=int, default=4095)
    ap.add_argument("--requests", type=int, default=100_000)
    ap.add_argument("--capacity", type=int, default=12)
    ap.add_argument("--occupancies", default="0.16,0.25,0.4,0.5,0.6,0.75,0.83")
    ap.add_argument("--localities", default="0,0.3,0.5,0.6,0.9")
    ap.add_argument("--repeats", type=int, default=1)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("-o", "--output", default=None)
    args = ap.parse_args()
    warnings.simplefilter("ignore", RuntimeWarning)

    occ = [float(x) for x in args.occupancies.split(",")]
    locs = [float(x) for x in args.localities.split(",")]
    base = ExperimentConfig(capacity=args.capacity, n_items=args.items, requests=args.requests, repeats=args.repeats)
    rows = sweep(base, [args.capacity], occ, locs, jobs=args.jobs)

    print("mean total cost / 1e6  (* = row minimum)")
    print("p      " + "".join(f"f={f:<8}" for f in occ))
    for p in locs:
        means = []
        for f in occ:
            sel = [r.total_cost for r in rows if r.f == f and r.locality == p]
            means.append(sum(sel) / len(sel) / 1e6)
        best = min(means)
        print(f"{p:<7}" + "".join(f"{m:<9.3f}{'*' if m == best else ' '}" for m in means))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(format_csv(rows, {"experiment": "occupancy", "base": base}))


if __name__ == "__main__":
    main()
