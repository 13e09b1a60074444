"""Run every JSON config under scripts/configs and write CSV/JSON reports.

usage: python3 scripts/run_configs.py [--out results] [name ...]
"""

import argparse
import logging
import pathlib
import sys

from fourlat.errors import FourlatError
from fourlat.harness import emit, load_config, run

HERE = pathlib.Path(__file__).parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("names", nargs="*", help="config stems (default: all)")
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    logging.basicConfig(level=logging.ERROR)
    out = pathlib.Path(args.out)
    out.mkdir(exist_ok=True)
    paths = sorted((HERE / "configs").glob("*.json"))
    if args.names:
        paths = [p for p in paths if p.stem in args.names]
    failed = 0
    for p in paths:
        try:
            rep = run(load_config(p))
        except FourlatError as exc:
            print(f"{p.stem:22s} ERROR {exc}")
            failed += 1
            continue
        emit(rep, "csv", out / f"{p.stem}.csv")
        emit(rep, "json", out / f"{p.stem}.json")
        slope = f"slope {rep.rate.slope:.3f} vs {rep.rate.gamma:.3f}" if rep.rate else ""
        print(f"{p.stem:22s} {'pass' if rep.verdict else 'FAIL'} {slope}")
        failed += not rep.verdict
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
