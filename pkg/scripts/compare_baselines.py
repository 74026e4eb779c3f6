"""Access cost of the self-adjusting tree vs. the static optimum and the
demand-oblivious placement, across temporal locality (c=4, f=1/2).

    python scripts/compare_baselines.py --items 4095 --requests 100000 -o baselines.csv
"""
import argparse
import warnings

from seedtree.experiment import ExperimentConfig, format_csv, sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--items", type=int, default=4095)
    ap.add_argument("--requests", type=int, default=100_000)
    ap.add_argument("--repeats", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("-o", "--output", default=None)
    args = ap.parse_args()
    warnings.simplefilter("ignore", RuntimeWarning)

    base = ExperimentConfig(n_items=args.items, requests=args.requests, seed=args.seed, repeats=args.repeats)
    rows = sweep(base, [4], [0.5], [0.0, 0.3, 0.6, 0.9], jobs=args.jobs)
    for r in rows:
        print(f"locality={r.locality:<4} seedtree={r.access_cost / 1e5:8.2f}  "
              f"static-opt={r.static_opt_cost / 1e5:8.2f}  oblivious={r.oblivious_cost / 1e5:8.2f}  (x1e5)")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(format_csv(rows, {"experiment": "baselines", "base": base}))


if __name__ == "__main__":
    main()
