"""Far-field decay of psi0 for the builtin pairs and the resulting theta'."""

import argparse

from fourlat.potentials import cos_potential
from fourlat.riesz import build_pair, BumpProfile, decay_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--radius", type=float, nargs="+", default=[64.0, 128.0, 256.0, 512.0])
    args = ap.parse_args()
    for ramp in ("expstep", "cosine"):
        for delta in (0.0, 0.5, 1.0):
            pair = build_pair(BumpProfile(1, ramp), BumpProfile(1, ramp), delta)
            for R in args.radius:
                rep = decay_check(pair, tau=2.0, radius=R)
                tp = cos_potential().theta_prime(rep.tau_supported, 1)
                print(f"{ramp:8s} delta={delta:3.1f} R={R:6.0f}  tau_supported={rep.tau_supported:6.2f}"
                      f"  theta'(theta=1)={tp:.3f}")


if __name__ == "__main__":
    main()
