"""Regenerate every experiment table (CSV plus manifest) into a results directory.

Usage: python3 scripts/reproduce.py [OUTDIR] [--quick]

--quick uses a coarse grid and 10 noise trials for a fast smoke run.
"""
import argparse
import os
import sys
import time

from saft_sampling.cli import main


def runs(outdir, quick):
    grid = ["--grid", "2001"] if quick else []
    trials = ["--trials", "10"] if quick else []
    return [
        ["exp-decay", "--classical", *grid, "--out", os.path.join(outdir, "decay.csv")],
        ["exp-noise", *grid, *trials, "--out", os.path.join(outdir, "noise.csv")],
        ["bounds", "--out", os.path.join(outdir, "bounds.csv")],
        ["instability", "--out", os.path.join(outdir, "instability.csv")],
        ["selftest", "--out", os.path.join(outdir, "selftest.json")],
    ]


def run_all(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("outdir", nargs="?", default="results")
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args(argv)
    os.makedirs(args.outdir, exist_ok=True)
    status = 0
    for cmd in runs(args.outdir, args.quick):
        t0 = time.perf_counter()
        code = main(cmd)
        print(f"{cmd[0]:<12} exit {code}  {time.perf_counter() - t0:6.1f} s", file=sys.stderr)
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(run_all())
