#!/usr/bin/env python3
"""Thin wrapper around the CLI: evaluate the decay bound for a config, run
the survival-curve simulation, and leave CSV + manifest in the output
directory.

Usage: python scripts/run_experiment.py CONFIG OUTDIR [--threads K]
"""

import argparse
import json
import sys

from adn_consensus.cli import main


def run():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("config")
    ap.add_argument("outdir")
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    with open(args.config, encoding="utf-8") as fh:
        model = json.load(fh).get("model")
    bound_cmd = "gamma-fs" if model == "fastswitch" else "gamma-sp"

    extra = [] if args.threads is None else ["--threads", str(args.threads)]
    for cmd in (bound_cmd, "simulate"):
        rc = main([cmd, "--config", args.config, "--out", args.outdir] + extra)
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(run())
