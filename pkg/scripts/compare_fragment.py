"""Label vs sampling vs independence on a dataset, as a plot-ready CSV.

Defaults to the bundled 18-row fragment; pass any CSV to use another table.

    python scripts/compare_fragment.py [data.csv] --bounds 2:12:2 --seeds 5
"""
import argparse
import sys
from importlib import resources

from pclabels.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv", nargs="?", default=str(resources.files("pclabels") / "data" / "compas_fragment.csv"))
    ap.add_argument("--bounds", default="2:12:2")
    ap.add_argument("--seeds", default="5")
    ap.add_argument("--pretty", action="store_true")
    args = ap.parse_args()
    argv = ["compare", args.csv, "--bounds", args.bounds, "--seeds", args.seeds]
    if args.pretty:
        argv.append("--pretty")
    sys.exit(cli_main(argv))


if __name__ == "__main__":
    main()
