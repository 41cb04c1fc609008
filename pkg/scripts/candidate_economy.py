"""Subsets generated by top-down vs naive search on correlated synthetic data.

    python scripts/candidate_economy.py --seeds 0 1 2 --bounds 10 30 50
"""
import argparse
import json
import time

from pclabels.search import SearchConfig, naive_search, top_down_search
from pclabels.synthetic import correlated_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--bounds", type=int, nargs="+", default=[10, 30, 50])
    ap.add_argument("--rows", type=int, default=2000)
    args = ap.parse_args()
    for seed in args.seeds:
        d = correlated_dataset(seed, n_rows=args.rows)
        for bound in args.bounds:
            cfg = SearchConfig(bound)
            t0 = time.perf_counter()
            _, td = top_down_search(d, cfg)
            t1 = time.perf_counter()
            _, nv = naive_search(d, cfg)
            t2 = time.perf_counter()
            print(json.dumps({
                "seed": seed,
                "bound": bound,
                "topdown_generated": td.subsets_generated,
                "naive_generated": nv.subsets_generated,
                "ratio": round(td.subsets_generated / nv.subsets_generated, 4),
                "topdown_error": td.error,
                "naive_error": nv.error,
                "topdown_s": round(t1 - t0, 3),
                "naive_s": round(t2 - t1, 3),
            }))


if __name__ == "__main__":
    main()
