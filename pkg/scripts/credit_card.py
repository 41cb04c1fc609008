"""Max-abs error of top-down labels on the Default of Credit Card Clients table.

The table is not bundled; export it to CSV and pass its path (or set
PCLABELS_CREDIT_CSV). Numerical attributes are bucketized into 5 bins.

    python scripts/credit_card.py credit.csv --bounds 10 100
"""
import argparse
import json
import os
import sys
import time

from pclabels.credit import ENV_VAR, load_credit_card
from pclabels.search import SearchConfig, top_down_search


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv", nargs="?", default=os.environ.get(ENV_VAR))
    ap.add_argument("--bounds", type=int, nargs="+", default=[10, 100])
    ap.add_argument("--bins", type=int, default=5)
    ap.add_argument("--strategy", choices=("equal-width", "equal-frequency"), default="equal-width")
    ap.add_argument("--eval", choices=("exact", "sorted"), default="sorted")
    args = ap.parse_args()
    if not args.csv:
        sys.exit(f"give the CSV path or set {ENV_VAR}")
    d = load_credit_card(args.csv, args.bins, args.strategy)
    print(f"# {d.row_count} rows, {d.n_attrs} attributes", file=sys.stderr)
    for bound in args.bounds:
        t0 = time.perf_counter()
        label, stats = top_down_search(d, SearchConfig(bound, eval_mode=args.eval))
        print(json.dumps({
            "bound": bound,
            "label": label.name,
            "size": label.size,
            "max_abs_error": stats.error,
            "error_pct": round(100 * stats.error / d.row_count, 3),
            "subsets_generated": stats.subsets_generated,
            "seconds": round(time.perf_counter() - t0, 1),
        }))


if __name__ == "__main__":
    main()
