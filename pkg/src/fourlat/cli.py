"""Command-line entry point: ``fourlat <subcommand> --config c.json``."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, ExperimentError, FourlatError
from .harness import load_config, run

# subcommand -> experiment kinds it accepts
SUBCOMMANDS = {
    "identity": ("identity-suite",),
    "rate": ("rate-free", "rate-potential"),
    "spectrum": ("spectrum-distance", "local-spectrum", "gap", "projection"),
    "eigen": ("eigen-track",),
    "commutator": ("commutator",),
    "blowup": ("y-blowup",),
}


def build_parser():
    p = argparse.ArgumentParser(prog="fourlat", description="Discretized Fourier multiplier experiments")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--csv", help="write the CSV report here")
        sp.add_argument("--json", help="write the JSON report here")
        if name == "rate":
            sp.add_argument("--h-min", type=float)
            sp.add_argument("--h-count", type=int)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, {"seed": args.seed})
        if cfg.kind not in SUBCOMMANDS[args.command]:
            raise ConfigError(f"'{args.command}' cannot run a {cfg.kind!r} config")
        if args.command == "rate":
            cfg = cfg.with_h_range(args.h_min, args.h_count)
        out = dict(cfg.output)
        if args.csv:
            out["csv"] = args.csv
        if args.json:
            out["json"] = args.json
        cfg.output = out
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(cfg)
    except ExperimentError as exc:
        print(f"experiment failed: {exc}", file=sys.stderr)
        return 1
    except FourlatError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if report.rate is not None:
        r = report.rate
        print(f"{report.experiment}: slope={r.slope:.4f} gamma={r.gamma:.4f} "
              f"tol={r.tolerance} R2={r.r2:.4f}")
    for k, v in report.checks.items():
        print(f"  {k}: {'ok' if v[0] else 'FAILED'} ({v[1]:.3e})")
    print(f"{report.experiment}: {'PASS' if report.verdict else 'FAIL'}")
    return 0 if report.verdict else 1


if __name__ == "__main__":
    sys.exit(main())
