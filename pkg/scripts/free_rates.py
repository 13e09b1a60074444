"""Fiber-method error norms for the builtin symbols over a range of h.

Prints one row per h and the fitted slope per symbol; optional --csv.
"""

import argparse
import csv

import numpy as np

from fourlat.harness import fit_rate
from fourlat.resolvent import error_norm_fiber
from fourlat.riesz import build_pair
from fourlat.symbols import bilaplacian, fraclap, laplacian, predicted_rate, pseudorel


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kmin", type=int, default=2)
    ap.add_argument("--kmax", type=int, default=8)
    ap.add_argument("--z", type=complex, default=-1.0)
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--csv")
    args = ap.parse_args()
    hs = [2.0 ** -k for k in range(args.kmin, args.kmax + 1)]
    pair = build_pair(delta=args.delta)
    syms = [fraclap(0.25), fraclap(0.5), fraclap(1.0), fraclap(1.5), fraclap(3.0),
            pseudorel(1.0), laplacian(), bilaplacian()]
    table = {s.name(): [error_norm_fiber(s, pair, h, args.z) for h in hs] for s in syms}
    print(f"{'h':>10s} " + " ".join(f"{n[:14]:>14s}" for n in table))
    for i, h in enumerate(hs):
        print(f"{h:10.3e} " + " ".join(f"{v[i]:14.4e}" for v in table.values()))
    for s in syms:
        slope = fit_rate(list(zip(hs, table[s.name()])))[0]
        print(f"{s.name():20s} slope {slope:6.3f}  predicted {predicted_rate(s):.3f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["h"] + list(table))
            for i, h in enumerate(hs):
                w.writerow([repr(h)] + [repr(v[i]) for v in table.values()])


if __name__ == "__main__":
    main()
