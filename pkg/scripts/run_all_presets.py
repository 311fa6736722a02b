"""Run every bundled preset through the CLI and report wall-clock times.

    python3 scripts/run_all_presets.py [--out runs] [--budget 120] [--only NAME ...]

Exits non-zero if any preset fails or exceeds the time budget.
"""

import argparse
import sys
import time

from photonic_sic import cli
from photonic_sic.config import list_presets


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs")
    ap.add_argument("--budget", type=float, default=120.0, help="seconds allowed per preset")
    ap.add_argument("--only", nargs="*", help="subset of preset names")
    args = ap.parse_args()
    names = args.only or [n for n, _ in list_presets()]
    bad = 0
    for name in names:
        t0 = time.perf_counter()
        code = cli.main(["run", name, "--out", args.out])
        wall = time.perf_counter() - t0
        over = wall > args.budget
        bad += code != 0 or over
        print(f"{name:24s} exit {code}  {wall:7.1f} s{'  OVER BUDGET' if over else ''}", flush=True)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
